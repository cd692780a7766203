#include "bubble/date.hpp"

#include <array>
#include <cstdio>

#include "bubble/errors.hpp"

namespace bubble {

// Low-level civil <-> serial conversions (Howard Hinnant's algorithms).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

namespace {

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

}  // namespace

Date::Date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        throw io_error("invalid calendar date " + std::to_string(year) + "-" +
                       std::to_string(month) + "-" + std::to_string(day));
    serial_ = days_from_civil(year, month, day);
}

int Date::year() const {
    int y, m, d;
    civil_from_days(serial_, y, m, d);
    return y;
}

int Date::month() const {
    int y, m, d;
    civil_from_days(serial_, y, m, d);
    return m;
}

int Date::day() const {
    int y, m, d;
    civil_from_days(serial_, y, m, d);
    return d;
}

int Date::weekday() const {
    // 1970-01-01 was a Thursday.
    std::int64_t wd = (serial_ + 3) % 7;
    if (wd < 0) wd += 7;
    return static_cast<int>(wd) + 1;
}

Date::IsoWeek Date::iso_week() const {
    // The ISO week of a date is the week of its Thursday.
    const Date thursday = add_days(4 - weekday());
    const int y = thursday.year();
    const std::int64_t jan1 = days_from_civil(y, 1, 1);
    const int week = static_cast<int>((thursday.serial() - jan1) / 7) + 1;
    return {y, week};
}

std::string Date::to_string() const {
    int y, m, d;
    civil_from_days(serial_, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

Date Date::parse(std::string_view text, std::string_view format) {
    int year = 0, month = 0, day = 0;
    bool have_y = false, have_m = false, have_d = false;
    std::size_t pos = 0;

    auto read_int = [&](int max_digits, bool& ok) {
        int value = 0;
        int digits = 0;
        while (pos < text.size() && digits < max_digits && text[pos] >= '0' &&
               text[pos] <= '9') {
            value = value * 10 + (text[pos] - '0');
            ++pos;
            ++digits;
        }
        ok = digits > 0;
        return value;
    };

    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] == '%' && f + 1 < format.size()) {
            const char tok = format[++f];
            bool ok = false;
            switch (tok) {
                case 'Y': year = read_int(4, ok); have_y = ok; break;
                case 'm': month = read_int(2, ok); have_m = ok; break;
                case 'd': day = read_int(2, ok); have_d = ok; break;
                case '%':
                    ok = pos < text.size() && text[pos] == '%';
                    if (ok) ++pos;
                    break;
                default:
                    throw config_error(std::string("unsupported date format token %") + tok);
            }
            if (!ok)
                throw io_error("date '" + std::string(text) + "' does not match format '" +
                               std::string(format) + "'");
        } else {
            if (pos >= text.size() || text[pos] != format[f])
                throw io_error("date '" + std::string(text) + "' does not match format '" +
                               std::string(format) + "'");
            ++pos;
        }
    }
    if (pos != text.size() || !(have_y && have_m && have_d))
        throw io_error("date '" + std::string(text) + "' does not match format '" +
                       std::string(format) + "'");
    return Date(year, month, day);
}

}  // namespace bubble
