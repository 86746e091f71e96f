#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "sarceval/datamodel.hpp"

namespace sarceval {

using ParsedLabel = std::variant<Label, Unparsed>;

/// Rule cascade on the trimmed, case-folded output:
///   1. first sentence starts with the word "yes" / "no";
///   2. first of "not sarcastic", "non-sarcastic", "unsarcastic" present -> NotSarcastic;
///   3. "sarcastic" or "sarcasm" present -> Sarcastic;
///   4. otherwise Unparsed.
ParsedLabel parse_label(std::string_view raw);

/// Drops leading boilerplate ("Sure,", "Explanation:", wrapping quotes) and
/// collapses whitespace. Idempotent.
std::string parse_explanation(std::string_view raw);

enum class UnparsedPolicy { AsNegative, AsPositive, Exclude };

std::string_view to_string(UnparsedPolicy policy);
std::optional<UnparsedPolicy> parse_unparsed_policy(std::string_view s);

/// Parses raw output according to the task.
ParsedOutput parse_output(Task task, std::string_view raw);

}  // namespace sarceval
