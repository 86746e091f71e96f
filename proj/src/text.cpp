#include "sarceval/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace sarceval::text {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Fixed English stopword list (the common NLTK set). Sorted for binary search.
constexpr std::array<std::string_view, 127> kStopwords = {
    "a",       "about",   "above",  "after",   "again",   "against",    "all",     "am",     "an",
    "and",     "any",     "are",    "as",      "at",      "be",         "because", "been",   "before",
    "being",   "below",   "between", "both",   "but",     "by",         "can",     "did",    "do",
    "does",    "doing",   "don",    "down",    "during",  "each",       "few",     "for",    "from",
    "further", "had",     "has",    "have",    "having",  "he",         "her",     "here",   "hers",
    "herself", "him",     "himself", "his",    "how",     "i",          "if",      "in",     "into",
    "is",      "it",      "its",    "itself",  "just",    "me",         "more",    "most",   "my",
    "myself",  "no",      "nor",    "not",     "now",     "of",         "off",     "on",     "once",
    "only",    "or",      "other",  "our",     "ours",    "ourselves",  "out",     "over",   "own",
    "s",       "same",    "she",    "should",  "so",      "some",       "such",    "t",      "than",
    "that",    "the",     "their",  "theirs",  "them",    "themselves", "then",    "there",  "these",
    "they",    "this",    "those",  "through", "to",      "too",        "under",   "until",  "up",
    "very",    "was",     "we",     "were",    "what",    "when",       "where",   "which",  "while",
    "who",     "whom",    "why",    "will",    "with",    "you",        "your",    "yours",  "yourself",
    "yourselves"};

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string strip_punctuation(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) { return split_whitespace(strip_punctuation(to_lower(s))); }

bool is_stopword(std::string_view word) { return std::binary_search(kStopwords.begin(), kStopwords.end(), word); }

}  // namespace sarceval::text
