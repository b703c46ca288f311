#include "hef/timeutil.hpp"

#include <cstdio>
#include <cstdlib>
#include <regex>

namespace hef {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

} // namespace

Timestamp civil_to_timestamp(const CivilTime& c) {
    const std::int64_t days = days_from_civil(c.year, c.month, c.day);
    const std::int64_t secs = days * 86400 + c.hour * 3600 + c.minute * 60 + c.second;
    return secs * kMicrosPerSecond + c.micros;
}

CivilTime timestamp_to_civil(Timestamp ts) {
    std::int64_t micros = ts % kMicrosPerSecond;
    std::int64_t secs = ts / kMicrosPerSecond;
    if (micros < 0) {
        micros += kMicrosPerSecond;
        secs -= 1;
    }
    std::int64_t days = secs / 86400;
    std::int64_t sod = secs % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    CivilTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(sod / 3600);
    c.minute = static_cast<int>((sod % 3600) / 60);
    c.second = static_cast<int>(sod % 60);
    c.micros = static_cast<int>(micros);
    return c;
}

std::string format_rfc3339(Timestamp ts) {
    const CivilTime c = timestamp_to_civil(ts);
    char buf[64];
    if (c.micros != 0) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06dZ", c.year, c.month,
                      c.day, c.hour, c.minute, c.second, c.micros);
    } else {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                      c.hour, c.minute, c.second);
    }
    return buf;
}

std::optional<Timestamp> parse_rfc3339(const std::string& text) {
    static const std::regex re(
        R"(^\s*(\d{4})-(\d{2})-(\d{2})[Tt ](\d{2}):(\d{2}):(\d{2})(\.\d+)?([Zz]|\+00:00)?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) return std::nullopt;
    CivilTime c;
    c.year = std::atoi(m[1].str().c_str());
    c.month = std::atoi(m[2].str().c_str());
    c.day = std::atoi(m[3].str().c_str());
    c.hour = std::atoi(m[4].str().c_str());
    c.minute = std::atoi(m[5].str().c_str());
    c.second = std::atoi(m[6].str().c_str());
    if (m[7].matched) {
        std::string frac = m[7].str().substr(1); // digits after the dot
        frac.resize(6, '0');
        c.micros = std::atoi(frac.substr(0, 6).c_str());
    }
    if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 || c.minute > 59 ||
        c.second > 60) {
        return std::nullopt;
    }
    return civil_to_timestamp(c);
}

std::optional<Timestamp> parse_filename_timestamp(const std::string& filename) {
    static const std::regex re(R"(_(\d{8})_(\d{6})\.)");
    auto begin = std::sregex_iterator(filename.begin(), filename.end(), re);
    auto end = std::sregex_iterator();
    std::optional<Timestamp> result;
    for (auto it = begin; it != end; ++it) {
        const std::string date = (*it)[1].str();
        const std::string time = (*it)[2].str();
        CivilTime c;
        c.year = std::atoi(date.substr(0, 4).c_str());
        c.month = std::atoi(date.substr(4, 2).c_str());
        c.day = std::atoi(date.substr(6, 2).c_str());
        c.hour = std::atoi(time.substr(0, 2).c_str());
        c.minute = std::atoi(time.substr(2, 2).c_str());
        c.second = std::atoi(time.substr(4, 2).c_str());
        if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 ||
            c.minute > 59 || c.second > 60) {
            continue;
        }
        result = civil_to_timestamp(c);
    }
    return result;
}

std::string utc_date(Timestamp ts) {
    const CivilTime c = timestamp_to_civil(ts);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
}

} // namespace hef
