#pragma once
// Small string helpers shared by the parsers and canonicalizers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reckg::text {

std::string_view trim(std::string_view s);

/// Trims and replaces every run of internal whitespace with a single space.
std::string collapse_whitespace(std::string_view s);

/// ASCII lowercase plus the Latin-1 supplement capitals (U+00C0..U+00DE)
/// when encoded as UTF-8. Other code points pass through unchanged.
std::string case_fold(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

std::vector<std::string_view> split(std::string_view s, std::string_view separator);

bool is_valid_utf8(std::string_view s);

/// Re-encodes ISO-8859-1 bytes as UTF-8.
std::string latin1_to_utf8(std::string_view s);

std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Truncates at a code point boundary, appending "..." when shortened.
std::string ellipsize(std::string_view s, std::size_t max_bytes);

}  // namespace reckg::text
