#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace lotmatch {

// Calendar date stored as days since 1970-01-01, proleptic Gregorian.
// Civil conversions use the classic era/year-of-era arithmetic, so any date
// within int32 range round-trips exactly.
struct Date {
    int32_t days = 0;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;
    constexpr Date operator+(int d) const { return Date{days + d}; }
    constexpr Date operator-(int d) const { return Date{days - d}; }
    constexpr int operator-(Date o) const { return days - o.days; }
};

constexpr int32_t days_from_civil(int32_t y, uint32_t m, uint32_t d) {
    y -= m <= 2;
    const int32_t era = (y >= 0 ? y : y - 399) / 400;
    const uint32_t yoe = static_cast<uint32_t>(y - era * 400);
    const uint32_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const uint32_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int32_t>(doe) - 719468;
}

constexpr void civil_from_days(int32_t z, int32_t& y, uint32_t& m, uint32_t& d) {
    z += 719468;
    const int32_t era = (z >= 0 ? z : z - 146096) / 146097;
    const uint32_t doe = static_cast<uint32_t>(z - era * 146097);
    const uint32_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int32_t yr = static_cast<int32_t>(yoe) + era * 400;
    const uint32_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const uint32_t mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : 9) - (mp < 10 ? 0 : 12);
    y = yr + (m <= 2);
}

constexpr Date make_date(int32_t y, uint32_t m, uint32_t d) { return Date{days_from_civil(y, m, d)}; }

constexpr bool is_leap(int32_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

constexpr uint32_t days_in_month(int32_t y, uint32_t m) {
    constexpr std::array<uint32_t, 12> lens{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lens[m - 1];
}

namespace detail {
inline bool digits(std::string_view s, size_t pos, size_t n, int64_t& out) {
    if (pos + n > s.size()) return false;
    int64_t v = 0;
    for (size_t i = pos; i < pos + n; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}
}  // namespace detail

// Strict "YYYY-MM-DD"; rejects impossible calendar dates.
inline std::optional<Date> parse_date(std::string_view s) {
    int64_t y, m, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!detail::digits(s, 0, 4, y) || !detail::digits(s, 5, 2, m) || !detail::digits(s, 8, 2, d))
        return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(static_cast<int32_t>(y), static_cast<uint32_t>(m)))
        return std::nullopt;
    return make_date(static_cast<int32_t>(y), static_cast<uint32_t>(m), static_cast<uint32_t>(d));
}

inline std::string format_date(Date dt) {
    int32_t y;
    uint32_t m, d;
    civil_from_days(dt.days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

// Date plus seconds of day. Timestamps without a time-of-day parse as 00:00:00.
struct DateTime {
    Date date;
    int32_t sec = 0;

    friend constexpr auto operator<=>(const DateTime&, const DateTime&) = default;
};

// "YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SS".
inline std::optional<DateTime> parse_datetime(std::string_view s) {
    if (s.size() == 10) {
        auto d = parse_date(s);
        if (!d) return std::nullopt;
        return DateTime{*d, 0};
    }
    if (s.size() != 19 || (s[10] != ' ' && s[10] != 'T') || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    auto d = parse_date(s.substr(0, 10));
    if (!d) return std::nullopt;
    int64_t hh, mm, ss;
    if (!detail::digits(s, 11, 2, hh) || !detail::digits(s, 14, 2, mm) || !detail::digits(s, 17, 2, ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return DateTime{*d, static_cast<int32_t>(hh * 3600 + mm * 60 + ss)};
}

inline std::string format_datetime(DateTime t) {
    char buf[32];
    int32_t h = t.sec / 3600, m = (t.sec / 60) % 60, s = t.sec % 60;
    std::snprintf(buf, sizeof buf, "%s %02d:%02d:%02d", format_date(t.date).c_str(), h, m, s);
    return buf;
}

}  // namespace lotmatch
