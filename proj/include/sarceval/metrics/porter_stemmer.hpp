#pragma once

#include <string>
#include <string_view>

namespace sarceval::metrics {

/// Porter (1980) suffix-stripping stemmer, following the author's reference C
/// implementation. Expects a lowercase ASCII word; words of length <= 2 are
/// returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace sarceval::metrics
