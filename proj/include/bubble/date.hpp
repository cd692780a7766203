#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bubble {

/// Calendar date (proleptic Gregorian). Stored as days since 1970-01-01 so
/// ordering and arithmetic are cheap.
class Date {
public:
    Date() = default;
    Date(int year, int month, int day);

    static Date from_serial(std::int64_t days) {
        Date d;
        d.serial_ = days;
        return d;
    }

    /// Parse with a strftime-like format string; supported tokens: %Y %m %d %%.
    /// Throws io_error on mismatch or an invalid calendar date.
    static Date parse(std::string_view text, std::string_view format = "%Y-%m-%d");

    std::int64_t serial() const { return serial_; }
    int year() const;
    int month() const;
    int day() const;

    /// ISO-8601 weekday, Monday = 1 ... Sunday = 7.
    int weekday() const;

    /// ISO-8601 week-numbering year and week (1..53).
    struct IsoWeek {
        int year;
        int week;
        auto operator<=>(const IsoWeek&) const = default;
    };
    IsoWeek iso_week() const;

    Date add_days(std::int64_t n) const { return from_serial(serial_ + n); }

    std::string to_string() const;  // YYYY-MM-DD

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t serial_ = 0;
};

std::int64_t days_from_civil(int y, int m, int d);
void civil_from_days(std::int64_t z, int& y, int& m, int& d);

}  // namespace bubble
