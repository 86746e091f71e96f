#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sarceval::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);  // ASCII only; other bytes pass through
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

/// Deletes ASCII punctuation characters (std::ispunct in the C locale).
std::string strip_punctuation(std::string_view s);

/// The shared tokenizer: lowercase, delete ASCII punctuation, split on
/// whitespace. Every generation metric and term extraction goes through it.
std::vector<std::string> tokenize(std::string_view s);

/// Membership in the shipped English stopword list.
bool is_stopword(std::string_view word);

}  // namespace sarceval::text
