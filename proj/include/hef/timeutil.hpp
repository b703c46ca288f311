#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace hef {

/// UTC instant as microseconds since the unix epoch.
using Timestamp = std::int64_t;

constexpr std::int64_t kMicrosPerSecond = 1000000;

struct CivilTime {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
    int micros = 0;
};

Timestamp civil_to_timestamp(const CivilTime& civil);
CivilTime timestamp_to_civil(Timestamp ts);

/// Formats as RFC 3339 UTC, e.g. "2012-07-02T08:15:16Z".
/// A fractional part is appended only when the microsecond field is nonzero.
std::string format_rfc3339(Timestamp ts);

/// Parses "YYYY-MM-DD[T ]hh:mm:ss[.frac][Z]" (UTC assumed). Returns nullopt on
/// malformed input. Accepts FITS DATE-OBS values, which omit the Z suffix.
std::optional<Timestamp> parse_rfc3339(const std::string& text);

/// Extracts a timestamp from a filename following "*_YYYYMMDD_HHMMSS.*".
/// The last such group in the name wins.
std::optional<Timestamp> parse_filename_timestamp(const std::string& filename);

/// "YYYY-MM-DD" of the UTC day containing ts; used for per-day score grouping.
std::string utc_date(Timestamp ts);

} // namespace hef
