#pragma once

#include <filesystem>
#include <string>

#include "sarceval/datamodel.hpp"

namespace sarceval {

/// Prompt text with named slots {text}, {objects} and {concepts}. Baseline
/// templates may only use {text}; Enhanced templates must use all three.
class PromptTemplate {
 public:
  /// Throws Error(InvalidTemplate) when the slot rules are broken.
  PromptTemplate(Task task, Method method, std::string template_text, std::string version);

  Task task() const { return task_; }
  Method method() const { return method_; }
  const std::string& text() const { return text_; }
  const std::string& version() const { return version_; }

 private:
  Task task_;
  Method method_;
  std::string text_;
  std::string version_;
};

/// Built-in templates, version "v1".
PromptTemplate default_template(Task task, Method method);
inline constexpr std::string_view kDefaultTemplateVersion = "v1";

/// Reads <dir>/<task>_<method>.txt (e.g. msd_enhanced.txt). The version is
/// the trimmed content of <dir>/VERSION, or the directory name.
PromptTemplate load_template(const std::filesystem::path& dir, Task task, Method method);

struct RenderedPrompt {
  std::string text;
  std::string fingerprint;
};

std::string render_objects(const std::vector<Detection>& detections);  // "dog (brown), cat"
std::string render_concepts(const std::vector<ConceptEdge>& concepts);  // "a —Rel→ b; ..."

/// Baseline rendering. Throws MissingSlotData for an Enhanced template.
RenderedPrompt render(const PromptTemplate& tmpl, const Sample& sample);
/// Enhanced rendering. Throws ConfigError for a Baseline template.
RenderedPrompt render(const PromptTemplate& tmpl, const Sample& sample, const EnrichedContext& ctx);

}  // namespace sarceval
