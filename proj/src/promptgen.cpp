#include "sarceval/promptgen.hpp"

#include "sarceval/error.hpp"
#include "sarceval/serialization.hpp"
#include "sarceval/text.hpp"

namespace sarceval {

namespace {

constexpr std::string_view kMsdBaseline =
    "You are shown an image and the text of a social media post that was published with it.\n"
    "\n"
    "Post text: \"{text}\"\n"
    "\n"
    "Is this post sarcastic? Answer Yes or No, then explain.\n"
    "Begin your answer with \"Yes\" or \"No\".";

constexpr std::string_view kMsdEnhanced =
    "You are shown an image and the text of a social media post that was published with it.\n"
    "\n"
    "Post text: \"{text}\"\n"
    "Detected objects: {objects}\n"
    "Related concepts: {concepts}\n"
    "\n"
    "Use the detected objects and related concepts as extra context about the image and the text.\n"
    "Is this post sarcastic? Answer Yes or No, then explain.\n"
    "Begin your answer with \"Yes\" or \"No\".";

constexpr std::string_view kMseBaseline =
    "You are shown an image and the text of a sarcastic social media post that was published with it.\n"
    "\n"
    "Post text: \"{text}\"\n"
    "\n"
    "Explain why this post is sarcastic.\n"
    "Answer with a single paragraph.";

constexpr std::string_view kMseEnhanced =
    "You are shown an image and the text of a sarcastic social media post that was published with it.\n"
    "\n"
    "Post text: \"{text}\"\n"
    "Detected objects: {objects}\n"
    "Related concepts: {concepts}\n"
    "\n"
    "Use the detected objects and related concepts as extra context about the image and the text.\n"
    "Explain why this post is sarcastic.\n"
    "Answer with a single paragraph.";

bool has_slot(std::string_view text, std::string_view slot) { return text.find(slot) != std::string_view::npos; }

// Single left-to-right pass so substituted values are never re-expanded.
std::string substitute(std::string_view tmpl, std::string_view text, std::string_view objects,
                       std::string_view concepts) {
  std::string out;
  out.reserve(tmpl.size() + text.size() + objects.size() + concepts.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto rest = tmpl.substr(i);
      if (rest.starts_with("{text}")) {
        out += text;
        i += 6;
        continue;
      }
      if (rest.starts_with("{objects}")) {
        out += objects;
        i += 9;
        continue;
      }
      if (rest.starts_with("{concepts}")) {
        out += concepts;
        i += 10;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::string template_file_name(Task task, Method method) {
  return std::string(to_string(task)) + "_" + std::string(to_string(method)) + ".txt";
}

}  // namespace

PromptTemplate::PromptTemplate(Task task, Method method, std::string template_text, std::string version)
    : task_(task), method_(method), text_(std::move(template_text)), version_(std::move(version)) {
  const bool objects = has_slot(text_, "{objects}");
  const bool concepts = has_slot(text_, "{concepts}");
  if (!has_slot(text_, "{text}")) throw Error(ErrorKind::InvalidTemplate, "template lacks {text}");
  if (method_ == Method::Baseline && (objects || concepts))
    throw Error(ErrorKind::InvalidTemplate, "baseline template must not use {objects}/{concepts}");
  if (method_ == Method::Enhanced && !(objects && concepts))
    throw Error(ErrorKind::InvalidTemplate, "enhanced template needs both {objects} and {concepts}");
  if (version_.empty()) throw Error(ErrorKind::InvalidTemplate, "empty template version");
}

PromptTemplate default_template(Task task, Method method) {
  std::string_view text;
  if (task == Task::MSD)
    text = method == Method::Baseline ? kMsdBaseline : kMsdEnhanced;
  else
    text = method == Method::Baseline ? kMseBaseline : kMseEnhanced;
  return PromptTemplate(task, method, std::string(text), std::string(kDefaultTemplateVersion));
}

PromptTemplate load_template(const std::filesystem::path& dir, Task task, Method method) {
  auto body = read_file(dir / template_file_name(task, method));
  if (!body.empty() && body.back() == '\n') body.pop_back();
  std::string version;
  if (std::filesystem::is_regular_file(dir / "VERSION"))
    version = std::string(text::trim(read_file(dir / "VERSION")));
  if (version.empty()) version = dir.filename().string();
  return PromptTemplate(task, method, std::move(body), std::move(version));
}

std::string render_objects(const std::vector<Detection>& detections) {
  if (detections.empty()) return "none";
  std::string out;
  for (const auto& d : detections) {
    if (!out.empty()) out += ", ";
    out += d.label;
    if (!d.attributes.empty()) {
      out += " (";
      for (std::size_t i = 0; i < d.attributes.size(); ++i) {
        if (i > 0) out += ", ";
        out += d.attributes[i];
      }
      out += ")";
    }
  }
  return out;
}

std::string render_concepts(const std::vector<ConceptEdge>& concepts) {
  if (concepts.empty()) return "none";
  std::string out;
  for (const auto& c : concepts) {
    if (!out.empty()) out += "; ";
    out += c.source + " —" + c.relation + "→ " + c.target;
  }
  return out;
}

RenderedPrompt render(const PromptTemplate& tmpl, const Sample& sample) {
  if (tmpl.method() == Method::Enhanced)
    throw Error(ErrorKind::MissingSlotData, "enhanced template rendered without enrichment for " + sample.id);
  auto text = substitute(tmpl.text(), sample.text, "", "");
  auto fp = fingerprint(text);
  return {std::move(text), std::move(fp)};
}

RenderedPrompt render(const PromptTemplate& tmpl, const Sample& sample, const EnrichedContext& ctx) {
  if (tmpl.method() == Method::Baseline)
    throw Error(ErrorKind::ConfigError, "baseline template rendered with enrichment for " + sample.id);
  auto text = substitute(tmpl.text(), sample.text, render_objects(ctx.detections), render_concepts(ctx.concepts));
  auto fp = fingerprint(text);
  return {std::move(text), std::move(fp)};
}

}  // namespace sarceval
