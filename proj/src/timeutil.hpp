#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "types.hpp"

namespace fxp {

/// Parses an ISO-8601 UTC timestamp "YYYY-MM-DDThh:mm:ss" (separator 'T' or
/// ' ', seconds optional, optional trailing 'Z'). Returns nullopt on anything
/// malformed or out of range. No local-time interpretation ever happens.
std::optional<Timestamp> parse_utc(std::string_view s);

/// Formats as "YYYY-MM-DDThh:mm:ssZ".
std::string format_utc(Timestamp t);

/// Calendar day index (days since 1970-01-01, floor division).
std::int64_t utc_day(Timestamp t);

}  // namespace fxp
