#include "bubble/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "bubble/errors.hpp"
#include "bubble/io.hpp"

namespace bubble {

std::string_view to_string(Frequency f) {
    switch (f) {
        case Frequency::daily: return "daily";
        case Frequency::weekly: return "weekly";
        case Frequency::monthly: return "monthly";
        case Frequency::irregular: return "irregular";
    }
    return "irregular";
}

TimeSeries::TimeSeries(std::vector<Date> dates, std::vector<double> values,
                       Frequency frequency, std::string units)
    : dates_(std::move(dates)),
      values_(std::move(values)),
      frequency_(frequency),
      units_(std::move(units)) {
    if (dates_.size() != values_.size())
        throw std::invalid_argument("TimeSeries: dates and values differ in length");
    if (dates_.empty()) throw std::invalid_argument("TimeSeries: needs at least one observation");
    for (std::size_t i = 1; i < dates_.size(); ++i)
        if (!(dates_[i - 1] < dates_[i]))
            throw std::invalid_argument("TimeSeries: timestamps must be strictly increasing (" +
                                        dates_[i].to_string() + " at position " +
                                        std::to_string(i) + ")");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("TimeSeries: non-finite value at position " +
                                        std::to_string(i));
}

Panel::Panel(std::vector<Date> dates, std::vector<std::string> names,
             std::vector<std::vector<double>> columns)
    : dates_(std::move(dates)), names_(std::move(names)), columns_(std::move(columns)) {
    if (names_.size() != columns_.size())
        throw std::invalid_argument("Panel: names and columns differ in count");
    for (const auto& col : columns_)
        if (col.size() != dates_.size())
            throw std::invalid_argument("Panel: column length does not match timestamps");
}

bool Panel::has_column(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Panel::column(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        throw config_error("unknown column '" + std::string(name) + "'");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

TimeSeries Panel::to_series(std::string_view name, Frequency frequency) const {
    return TimeSeries(dates_, column(name), frequency, std::string(name));
}

Panel load_csv(const std::string& path, const CsvSchema& schema) {
    const CsvTable table = read_csv_table(path);

    auto column_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end())
            throw config_error("column '" + name + "' not found in " + path);
        return static_cast<std::size_t>(it - table.header.begin());
    };

    const std::size_t date_idx = column_index(schema.date_column);
    std::vector<std::string> value_names = schema.value_columns;
    if (value_names.empty()) {
        for (std::size_t j = 0; j < table.header.size(); ++j)
            if (j != date_idx) value_names.push_back(table.header[j]);
    }
    std::vector<std::size_t> value_idx;
    value_idx.reserve(value_names.size());
    for (const auto& name : value_names) value_idx.push_back(column_index(name));

    struct Row {
        Date date;
        std::vector<double> values;
        std::size_t file_row;
    };
    std::vector<Row> rows;
    rows.reserve(table.rows.size());

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        const std::size_t file_row = r + 2;  // 1-based, counting the header line
        if (fields.size() != table.header.size())
            throw io_error(path + ": row " + std::to_string(file_row) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(table.header.size()));
        Row row;
        row.file_row = file_row;
        try {
            row.date = Date::parse(fields[date_idx], schema.date_format);
        } catch (const io_error& e) {
            throw io_error(path + ": row " + std::to_string(file_row) + ", column '" +
                           schema.date_column + "': " + e.what());
        }
        row.values.reserve(value_idx.size());
        for (std::size_t j = 0; j < value_idx.size(); ++j) {
            const std::string& cell = fields[value_idx[j]];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
                throw io_error(path + ": row " + std::to_string(file_row) + ", column '" +
                               value_names[j] + "': cannot parse value '" + cell + "'");
            row.values.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error(path + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].date == rows[i - 1].date)
            throw io_error(path + ": duplicate timestamp " + rows[i].date.to_string() +
                           " at row " + std::to_string(rows[i].file_row));

    std::vector<Date> dates;
    dates.reserve(rows.size());
    std::vector<std::vector<double>> columns(value_names.size(),
                                             std::vector<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        dates.push_back(rows[i].date);
        for (std::size_t j = 0; j < value_names.size(); ++j)
            columns[j][i] = rows[i].values[j];
    }
    return Panel(std::move(dates), std::move(value_names), std::move(columns));
}

ReturnSeries log_returns(const TimeSeries& ts) {
    if (ts.size() < 2)
        throw std::invalid_argument("log_returns: need at least 2 observations");
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!(ts.value(i) > 0.0))
            throw std::domain_error("log_returns: non-positive value at index " +
                                    std::to_string(i));
    std::vector<Date> dates(ts.dates().begin() + 1, ts.dates().end());
    std::vector<double> values(ts.size() - 1);
    for (std::size_t i = 1; i < ts.size(); ++i)
        values[i - 1] = std::log(ts.value(i) / ts.value(i - 1));
    TimeSeries out(std::move(dates), std::move(values), ts.frequency(), ts.units());
    out.metadata()["transform"] = "log_return";
    return ReturnSeries{std::move(out)};
}

Panel align_and_drop_missing(const std::vector<TimeSeries>& columns,
                             const std::vector<std::string>& names) {
    if (columns.empty())
        throw std::invalid_argument("align_and_drop_missing: need at least one series");
    if (!names.empty() && names.size() != columns.size())
        throw std::invalid_argument("align_and_drop_missing: name count mismatch");

    // Count how many series contain each date; keep dates present everywhere,
    // in the order of the first series.
    std::unordered_map<std::int64_t, std::size_t> hits;
    for (const auto& ts : columns)
        for (const auto& d : ts.dates()) ++hits[d.serial()];

    std::vector<Date> shared;
    for (const auto& d : columns.front().dates())
        if (hits[d.serial()] == columns.size()) shared.push_back(d);
    if (shared.empty())
        throw std::domain_error("align_and_drop_missing: empty timestamp intersection");

    std::vector<std::vector<double>> out_columns;
    out_columns.reserve(columns.size());
    for (const auto& ts : columns) {
        std::unordered_map<std::int64_t, double> lookup;
        lookup.reserve(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i)
            lookup.emplace(ts.date(i).serial(), ts.value(i));
        std::vector<double> col;
        col.reserve(shared.size());
        for (const auto& d : shared) col.push_back(lookup.at(d.serial()));
        out_columns.push_back(std::move(col));
    }

    std::vector<std::string> out_names = names;
    if (out_names.empty()) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const std::string& u = columns[j].units();
            out_names.push_back(u.empty() ? "col" + std::to_string(j) : u);
        }
    }
    return Panel(std::move(shared), std::move(out_names), std::move(out_columns));
}

TimeSeries to_weekly_mean(const TimeSeries& ts) {
    if (ts.frequency() != Frequency::daily)
        throw std::invalid_argument("to_weekly_mean: input must be a daily series");

    struct Group {
        Date::IsoWeek week;
        Date last_date;
        double sum = 0.0;
        int count = 0;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Date::IsoWeek w = ts.date(i).iso_week();
        if (groups.empty() || !(groups.back().week == w))
            groups.push_back(Group{w, ts.date(i), 0.0, 0});
        Group& g = groups.back();
        g.last_date = ts.date(i);
        g.sum += ts.value(i);
        g.count += 1;
    }

    std::vector<Date> dates;
    std::vector<double> values;
    dates.reserve(groups.size());
    values.reserve(groups.size());
    int modal_count = 0;
    {
        std::map<int, int> freq;
        for (const auto& g : groups) ++freq[g.count];
        int best = 0;
        for (const auto& [count, n] : freq)
            if (n > best || (n == best && count > modal_count)) {
                best = n;
                modal_count = count;
            }
    }
    std::string partial;
    for (const auto& g : groups) {
        dates.push_back(g.last_date);
        values.push_back(g.sum / g.count);
        if (g.count < modal_count) {
            if (!partial.empty()) partial += ",";
            partial += std::to_string(g.week.year) + "-W" + std::to_string(g.week.week);
        }
    }
    TimeSeries out(std::move(dates), std::move(values), Frequency::weekly, ts.units());
    if (!partial.empty()) out.metadata()["partial_weeks"] = partial;
    return out;
}

}  // namespace bubble
