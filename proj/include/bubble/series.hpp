#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/date.hpp"

namespace bubble {

enum class Frequency { daily, weekly, monthly, irregular };

std::string_view to_string(Frequency f);

/// Dated univariate series. Timestamps are strictly increasing and all
/// values are finite; both are enforced at construction.
class TimeSeries {
public:
    TimeSeries(std::vector<Date> dates, std::vector<double> values,
               Frequency frequency = Frequency::irregular, std::string units = "");

    std::size_t size() const { return values_.size(); }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<double>& values() const { return values_; }
    const Date& date(std::size_t i) const { return dates_[i]; }
    double value(std::size_t i) const { return values_[i]; }

    Frequency frequency() const { return frequency_; }
    void set_frequency(Frequency f) { frequency_ = f; }
    const std::string& units() const { return units_; }
    void set_units(std::string u) { units_ = std::move(u); }

    std::map<std::string, std::string>& metadata() { return metadata_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

private:
    std::vector<Date> dates_;
    std::vector<double> values_;
    Frequency frequency_ = Frequency::irregular;
    std::string units_;
    std::map<std::string, std::string> metadata_;
};

/// Log-return transform of a TimeSeries (one observation shorter than its
/// source).
struct ReturnSeries {
    TimeSeries series;

    std::size_t size() const { return series.size(); }
    const std::vector<double>& values() const { return series.values(); }
    const std::vector<Date>& dates() const { return series.dates(); }
};

/// Named columns over one shared timestamp vector; no missing cells.
class Panel {
public:
    Panel() = default;
    Panel(std::vector<Date> dates, std::vector<std::string> names,
          std::vector<std::vector<double>> columns);

    std::size_t rows() const { return dates_.size(); }
    std::size_t cols() const { return names_.size(); }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& names() const { return names_; }

    bool has_column(std::string_view name) const;
    const std::vector<double>& column(std::string_view name) const;
    const std::vector<double>& column(std::size_t i) const { return columns_[i]; }

    TimeSeries to_series(std::string_view name,
                         Frequency frequency = Frequency::irregular) const;

private:
    std::vector<Date> dates_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

struct CsvSchema {
    std::string date_column;
    std::vector<std::string> value_columns;  // empty: all non-date columns
    std::string date_format = "%Y-%m-%d";
};

/// Load a CSV file into a Panel. Rows are sorted by date; duplicate dates
/// and unparseable cells are errors that name the offending row and column.
Panel load_csv(const std::string& path, const CsvSchema& schema);

/// r_t = ln(y_t / y_{t-1}); requires strictly positive values.
ReturnSeries log_returns(const TimeSeries& ts);

/// Intersect the timestamps of all inputs and drop rows missing anywhere.
Panel align_and_drop_missing(const std::vector<TimeSeries>& columns,
                             const std::vector<std::string>& names = {});

/// Aggregate a daily series to one arithmetic mean per ISO week, labelled by
/// the week's last available date. Boundary weeks with fewer days than the
/// interior ones are kept and listed in the result's "partial_weeks" metadata.
TimeSeries to_weekly_mean(const TimeSeries& ts);

}  // namespace bubble
