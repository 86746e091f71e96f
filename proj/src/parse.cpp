#include "sarceval/parse.hpp"

#include <array>
#include <cctype>

#include "sarceval/text.hpp"

namespace sarceval {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool starts_with_word(std::string_view s, std::string_view word) {
  return s.starts_with(word) && (s.size() == word.size() || !is_alpha(s[word.size()]));
}

}  // namespace

ParsedLabel parse_label(std::string_view raw) {
  const std::string lower = text::to_lower(text::trim(raw));
  std::string_view s = lower;

  // Rule 1: skip leading markup like "**" or quotes, then look at the first sentence.
  auto first = s;
  while (!first.empty() && !is_alnum(first.front())) first.remove_prefix(1);
  first = first.substr(0, first.find_first_of(".!?\n"));
  if (starts_with_word(first, "yes")) return Label::Sarcastic;
  if (starts_with_word(first, "no")) return Label::NotSarcastic;

  // Rule 2: earliest negated form wins; all map to NotSarcastic.
  static constexpr std::array<std::string_view, 3> kNegated = {"not sarcastic", "non-sarcastic", "unsarcastic"};
  for (auto phrase : kNegated)
    if (s.find(phrase) != std::string_view::npos) return Label::NotSarcastic;

  // Rule 3.
  if (s.find("sarcastic") != std::string_view::npos || s.find("sarcasm") != std::string_view::npos)
    return Label::Sarcastic;

  return Unparsed{};
}

namespace {

bool strip_prefix_ci(std::string& s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  if (text::to_lower(std::string_view(s).substr(0, prefix.size())) != prefix) return false;
  s.erase(0, prefix.size());
  s = std::string(text::trim(s));
  return true;
}

bool strip_wrapping_quotes(std::string& s) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 3> kQuotes = {
      {{"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}}};  // ASCII and curly double quotes
  for (auto [open, close] : kQuotes) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      auto inner = std::string_view(s).substr(open.size(), s.size() - open.size() - close.size());
      // Only a wrapper if the quote does not also appear inside.
      if (inner.find(close) != std::string_view::npos) continue;
      s = std::string(text::trim(inner));
      return true;
    }
  }
  return false;
}

}  // namespace

std::string parse_explanation(std::string_view raw) {
  static constexpr std::array<std::string_view, 9> kBoilerplate = {
      "sure,", "sure!", "sure.", "certainly,", "certainly!", "certainly.", "explanation:", "answer:", "here is the explanation:"};
  std::string s = text::collapse_whitespace(raw);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto prefix : kBoilerplate) changed = strip_prefix_ci(s, prefix) || changed;
    changed = strip_wrapping_quotes(s) || changed;
  }
  return text::collapse_whitespace(s);
}

std::string_view to_string(UnparsedPolicy policy) {
  switch (policy) {
    case UnparsedPolicy::AsNegative: return "as_negative";
    case UnparsedPolicy::AsPositive: return "as_positive";
    case UnparsedPolicy::Exclude: return "exclude";
  }
  return "as_negative";
}

std::optional<UnparsedPolicy> parse_unparsed_policy(std::string_view s) {
  if (s == "as_negative") return UnparsedPolicy::AsNegative;
  if (s == "as_positive") return UnparsedPolicy::AsPositive;
  if (s == "exclude") return UnparsedPolicy::Exclude;
  return std::nullopt;
}

ParsedOutput parse_output(Task task, std::string_view raw) {
  if (task == Task::MSE) return Explanation{parse_explanation(raw)};
  auto label = parse_label(raw);
  if (auto* l = std::get_if<Label>(&label)) return *l;
  return Unparsed{};
}

}  // namespace sarceval
