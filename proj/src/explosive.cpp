#include "bubble/explosive.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "adf_common.hpp"
#include "bubble/errors.hpp"
#include "bubble/io.hpp"
#include "bubble/parallel.hpp"
#include "bubble/regress.hpp"
#include "bubble/stats.hpp"

namespace bubble {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

int min_window_rule(int T) {
    if (T < 30) throw std::invalid_argument("min_window_rule: need T >= 30");
    const int r0 = static_cast<int>(
        std::floor(T * (0.01 + 1.8 / std::sqrt(static_cast<double>(T)))));
    if (r0 < 10)
        throw std::domain_error("min_window_rule: rule yields fewer than 10 observations");
    return r0;
}

int min_duration_rule(int T) {
    if (T < 3) throw std::invalid_argument("min_duration_rule: need T >= 3");
    return static_cast<int>(std::ceil(std::log(static_cast<double>(T))));
}

double adf_window(std::span<const double> y, int first, int last, int lags) {
    const int n = static_cast<int>(y.size());
    if (first < 0 || last >= n || first >= last)
        throw std::invalid_argument("adf_window: window out of range");
    const int width = last - first + 1;
    if (width - 1 - lags < lags + 4)
        throw std::invalid_argument("adf_window: window too small for lag order " +
                                    std::to_string(lags));
    const auto reg = detail::adf_regression(y.subspan(first, width),
                                            DeterministicSpec::constant, lags, lags + 1);
    return reg.t_stat;
}

// One prefix-sum engine per lag order. Regressor streams for row t are
// [1, y_{t-1}, dy_{t-1}, ..., dy_{t-lags}] with response dy_t; cumulative
// pairwise products make any window's Gram matrix an O(1) lookup.
struct WindowScan::Engine {
    int lags = 0;
    int m = 0;  // regressor count = lags + 2
    int n = 0;
    std::vector<std::vector<long double>> prefix;  // one per stream pair

    Engine(std::span<const double> y, int lag_order) : lags(lag_order) {
        n = static_cast<int>(y.size());
        m = lags + 2;
        const int streams = m + 1;  // + response
        const int pairs = streams * (streams + 1) / 2;
        prefix.assign(pairs, std::vector<long double>(n + 1, 0.0L));

        std::vector<double> row(streams);
        for (int t = 0; t < n; ++t) {
            const bool valid = t >= lags + 1;
            if (valid) {
                row[0] = 1.0;
                row[1] = y[t - 1];
                for (int i = 1; i <= lags; ++i) row[1 + i] = y[t - i] - y[t - i - 1];
                row[m] = y[t] - y[t - 1];
            }
            for (int a = 0, idx = 0; a < streams; ++a) {
                for (int b = 0; b <= a; ++b, ++idx) {
                    const long double add =
                        valid ? static_cast<long double>(row[a]) * row[b] : 0.0L;
                    prefix[idx][t + 1] = prefix[idx][t] + add;
                }
            }
        }
    }

    double pair_sum(int a, int b, int t0, int t1) const {
        if (b > a) std::swap(a, b);
        const auto& p = prefix[a * (a + 1) / 2 + b];
        return static_cast<double>(p[t1 + 1] - p[t0]);
    }

    struct WindowOls {
        double t_stat = kNegInf;
        double rss = 0.0;
        int n_rows = 0;
        int n_params = 0;
        bool valid = false;
    };

    // Least squares on regression rows [t0, t1] (observation indices into y).
    WindowOls solve(int t0, int t1) const {
        WindowOls out;
        const int rows = t1 - t0 + 1;
        if (t0 < lags + 1 || rows < m + 2) return out;

        Eigen::MatrixXd A(m, m);
        Eigen::VectorXd v(m);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b <= a; ++b) {
                A(a, b) = pair_sum(a, b, t0, t1);
                A(b, a) = A(a, b);
            }
            v[a] = pair_sum(m, a, t0, t1);
        }
        const double sbb = pair_sum(m, m, t0, t1);

        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success) return out;
        const Eigen::VectorXd d = ldlt.vectorD();
        const double dmax = d.maxCoeff();
        if (!(dmax > 0.0) || d.minCoeff() < 1e-12 * dmax) return out;

        const Eigen::VectorXd beta = ldlt.solve(v);
        const double rss = std::max(sbb - beta.dot(v), 0.0);
        const double sigma2 = rss / static_cast<double>(rows - m);
        const Eigen::VectorXd ainv_col = ldlt.solve(Eigen::VectorXd::Unit(m, 1));
        const double var_phi = sigma2 * ainv_col[1];
        if (!(var_phi > 0.0)) return out;

        out.t_stat = beta[1] / std::sqrt(var_phi);
        out.rss = rss;
        out.n_rows = rows;
        out.n_params = m;
        out.valid = std::isfinite(out.t_stat);
        if (!out.valid) out.t_stat = kNegInf;
        return out;
    }
};

WindowScan::WindowScan(std::span<const double> y, WindowLagPolicy policy)
    : n_(static_cast<int>(y.size())), policy_(policy) {
    if (policy_.bic_max >= 0) {
        for (int p = 0; p <= policy_.bic_max; ++p) engines_.emplace_back(y, p);
    } else {
        if (policy_.fixed_lag < 0)
            throw std::invalid_argument("WindowScan: negative lag order");
        engines_.emplace_back(y, policy_.fixed_lag);
    }
}

WindowScan::~WindowScan() = default;
WindowScan::WindowScan(WindowScan&&) noexcept = default;
WindowScan& WindowScan::operator=(WindowScan&&) noexcept = default;

double WindowScan::stat(int first, int last) const {
    if (first < 0 || last >= n_ || first >= last) return kNegInf;
    if (policy_.bic_max < 0)
        return engines_[0].solve(first + engines_[0].lags + 1, last).t_stat;

    // Per-window BIC: each candidate evaluated on the window sample trimmed
    // to the largest feasible lag.
    int max_p = policy_.bic_max;
    while (max_p > 0 && (last - (first + max_p + 1) + 1) < max_p + 4) --max_p;
    const int t0 = first + max_p + 1;
    double best_bic = std::numeric_limits<double>::infinity();
    int best_p = 0;
    for (int p = 0; p <= max_p; ++p) {
        const auto fit = engines_[p].solve(t0, last);
        if (!fit.valid || fit.rss <= 0.0) continue;
        const double n_eff = static_cast<double>(fit.n_rows);
        const double bic =
            n_eff * std::log(fit.rss / n_eff) + fit.n_params * std::log(n_eff);
        if (bic < best_bic) {
            best_bic = bic;
            best_p = p;
        }
    }
    return engines_[best_p].solve(first + best_p + 1, last).t_stat;
}

namespace {

void validate_scan_args(int n, int r0, const WindowLagPolicy& policy) {
    if (r0 < 10 || r0 > n)
        throw std::invalid_argument("minimum window must satisfy 10 <= r0 <= T");
    if (n < r0 + 10)
        throw std::invalid_argument("need T >= r0 + 10 observations");
    const int lag = policy.bic_max >= 0 ? 0 : policy.fixed_lag;
    if (r0 < 2 * lag + 5)
        throw std::invalid_argument("minimum window too small for lag order " +
                                    std::to_string(lag));
}

}  // namespace

BsadfTrace bsadf_sequence(std::span<const double> y, int r0, WindowLagPolicy policy) {
    validate_scan_args(static_cast<int>(y.size()), r0, policy);
    const int n = static_cast<int>(y.size());
    const WindowScan scan(y, policy);

    BsadfTrace trace;
    trace.start_index = r0 - 1;
    trace.stats.resize(n - r0 + 1);
    for (int last = r0 - 1; last < n; ++last) {
        double sup = kNegInf;
        for (int first = 0; first <= last - r0 + 1; ++first)
            sup = std::max(sup, scan.stat(first, last));
        trace.stats[last - (r0 - 1)] = sup;
    }
    return trace;
}

double sadf(std::span<const double> y, int r0, WindowLagPolicy policy) {
    validate_scan_args(static_cast<int>(y.size()), r0, policy);
    const int n = static_cast<int>(y.size());
    const WindowScan scan(y, policy);
    double sup = kNegInf;
    for (int last = r0 - 1; last < n; ++last) sup = std::max(sup, scan.stat(0, last));
    return sup;
}

double gsadf(std::span<const double> y, int r0, WindowLagPolicy policy) {
    const BsadfTrace trace = bsadf_sequence(y, r0, policy);
    return *std::max_element(trace.stats.begin(), trace.stats.end());
}

std::vector<double> simulate_psy_null(const NullDgpConfig& config, Rng& rng) {
    if (config.T < 1) throw std::invalid_argument("simulate_psy_null: T must be positive");
    if (!(config.eta > 0.5))
        throw std::invalid_argument("simulate_psy_null: eta must exceed 1/2");
    const double drift =
        config.d * std::pow(static_cast<double>(config.T), -config.eta);
    std::vector<double> y(config.T);
    double prev = 0.0;
    for (int t = 0; t < config.T; ++t) {
        prev = drift + config.theta * prev + rng.normal();
        y[t] = prev;
    }
    return y;
}

namespace {

void summarize_draws(CvSimulation& sim, std::span<const double> levels) {
    sim.levels.assign(levels.begin(), levels.end());
    std::vector<double> sorted = sim.gsadf_draws;
    std::sort(sorted.begin(), sorted.end());
    sim.gsadf_cv.clear();
    for (double lv : levels) sim.gsadf_cv.push_back(quantile_sorted(sorted, lv / 100.0));

    const std::size_t trace_len =
        sim.bsadf_draws.empty() ? 0 : sim.bsadf_draws.front().size();
    sim.bsadf_cv.assign(levels.size(), std::vector<double>(trace_len));
    std::vector<double> column(sim.bsadf_draws.size());
    for (std::size_t j = 0; j < trace_len; ++j) {
        for (std::size_t r = 0; r < sim.bsadf_draws.size(); ++r)
            column[r] = sim.bsadf_draws[r][j];
        std::sort(column.begin(), column.end());
        for (std::size_t li = 0; li < levels.size(); ++li)
            sim.bsadf_cv[li][j] = quantile_sorted(column, levels[li] / 100.0);
    }
}

void validate_levels(std::span<const double> levels) {
    if (levels.empty()) throw std::invalid_argument("no quantile levels given");
    for (double lv : levels)
        if (!(lv > 0.0 && lv < 100.0))
            throw std::invalid_argument("quantile levels must lie in (0, 100)");
}

}  // namespace

void requantile(CvSimulation& sim, std::span<const double> levels) {
    validate_levels(levels);
    summarize_draws(sim, levels);
}

CvSimulation mc_critical_values(int T, int r0, int reps,
                                std::span<const double> levels, std::uint64_t seed,
                                int threads) {
    if (reps < 200) throw std::invalid_argument("mc_critical_values: need reps >= 200");
    validate_levels(levels);
    validate_scan_args(T, r0, WindowLagPolicy{});

    CvSimulation sim;
    sim.trace_start = r0 - 1;
    sim.gsadf_draws.resize(reps);
    sim.bsadf_draws.resize(reps);

    parallel_for(
        static_cast<std::size_t>(reps),
        [&](std::size_t r) {
            Rng rng(derive_seed(seed, r));
            const NullDgpConfig null_dgp{1.0, 1.0, 1.0, T};
            const std::vector<double> path = simulate_psy_null(null_dgp, rng);
            BsadfTrace trace = bsadf_sequence(path, r0, WindowLagPolicy{});
            sim.gsadf_draws[r] =
                *std::max_element(trace.stats.begin(), trace.stats.end());
            sim.bsadf_draws[r] = std::move(trace.stats);
        },
        threads);

    summarize_draws(sim, levels);
    return sim;
}

CvSimulation sieve_bootstrap_cvs(std::span<const double> y, int r0, int reps,
                                 std::span<const double> levels, std::uint64_t seed,
                                 WindowLagPolicy policy, int threads) {
    if (reps < 200) throw std::invalid_argument("sieve_bootstrap_cvs: need reps >= 200");
    validate_levels(levels);
    const int T = static_cast<int>(y.size());
    validate_scan_args(T, r0, policy);

    // AR sieve on the first differences, order by BIC on the common sample.
    std::vector<double> dy(T - 1);
    for (int t = 1; t < T; ++t) dy[t - 1] = y[t] - y[t - 1];
    const int nd = static_cast<int>(dy.size());
    const int max_order = std::min(8, nd / 8);

    int order = 0;
    {
        double best_bic = std::numeric_limits<double>::infinity();
        for (int p = 0; p <= max_order; ++p) {
            const int n_eff = nd - max_order;
            Eigen::VectorXd yy(n_eff);
            Eigen::MatrixXd X(n_eff, p + 1);
            for (int t = max_order; t < nd; ++t) {
                const int r = t - max_order;
                yy[r] = dy[t];
                X(r, 0) = 1.0;
                for (int i = 1; i <= p; ++i) X(r, i) = dy[t - i];
            }
            const RegressionFit fit = ols(yy, X);
            const double bic = n_eff * std::log(fit.rss / n_eff) +
                               (p + 1) * std::log(static_cast<double>(n_eff));
            if (bic < best_bic) {
                best_bic = bic;
                order = p;
            }
        }
    }

    // Final AR(order) fit on its own maximal sample; centered residuals feed
    // the resampling.
    Eigen::VectorXd ar_coef(order);
    std::vector<double> resid;
    {
        const int n_eff = nd - order;
        Eigen::VectorXd yy(n_eff);
        Eigen::MatrixXd X(n_eff, order + 1);
        for (int t = order; t < nd; ++t) {
            const int r = t - order;
            yy[r] = dy[t];
            X(r, 0) = 1.0;
            for (int i = 1; i <= order; ++i) X(r, i) = dy[t - i];
        }
        const RegressionFit fit = ols(yy, X);
        for (int i = 0; i < order; ++i) ar_coef[i] = fit.coefficients[i + 1];
        resid.assign(fit.residuals.data(), fit.residuals.data() + n_eff);
        const double m = mean(resid);
        for (double& e : resid) e -= m;
    }

    CvSimulation sim;
    sim.trace_start = r0 - 1;
    sim.gsadf_draws.resize(reps);
    sim.bsadf_draws.resize(reps);

    const int burn_in = 100 + order;
    parallel_for(
        static_cast<std::size_t>(reps),
        [&](std::size_t r) {
            Rng rng(derive_seed(seed, r));
            // Rebuild increments through the AR filter, then integrate under
            // the unit-root null (no drift).
            std::vector<double> u(burn_in + T, 0.0);
            for (int t = 0; t < burn_in + T; ++t) {
                double v = resid[rng.uniform_index(resid.size())];
                for (int i = 1; i <= order; ++i)
                    if (t - i >= 0) v += ar_coef[i - 1] * u[t - i];
                u[t] = v;
            }
            std::vector<double> path(T);
            double level = y[0];
            for (int t = 0; t < T; ++t) {
                level += u[burn_in + t];
                path[t] = level;
            }
            BsadfTrace trace = bsadf_sequence(path, r0, policy);
            sim.gsadf_draws[r] =
                *std::max_element(trace.stats.begin(), trace.stats.end());
            sim.bsadf_draws[r] = std::move(trace.stats);
        },
        threads);

    summarize_draws(sim, levels);
    return sim;
}

std::vector<Episode> date_stamp(const BsadfTrace& trace, int min_duration) {
    if (trace.cv.size() != trace.stats.size())
        throw std::invalid_argument("date_stamp: trace has no aligned critical values");
    if (min_duration < 1) throw std::invalid_argument("date_stamp: min_duration >= 1");

    std::vector<Episode> episodes;
    const int len = static_cast<int>(trace.stats.size());
    int run_start = -1;
    for (int j = 0; j <= len; ++j) {
        const bool above = j < len && trace.stats[j] > trace.cv[j];
        if (above && run_start < 0) run_start = j;
        if (!above && run_start >= 0) {
            const int run_len = j - run_start;
            if (run_len >= min_duration) {
                Episode ep;
                ep.start_index = trace.start_index + run_start;
                ep.end_index = trace.start_index + j - 1;
                ep.ongoing = j == len;
                ep.peak_stat = *std::max_element(trace.stats.begin() + run_start,
                                                 trace.stats.begin() + j);
                episodes.push_back(ep);
            }
            run_start = -1;
        }
    }
    return episodes;
}

CvCache::CvCache(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string CvCache::mc_key(int T, int r0, int reps, std::uint64_t seed) {
    return "mc_T" + std::to_string(T) + "_r" + std::to_string(r0) + "_n" +
           std::to_string(reps) + "_s" + std::to_string(seed);
}

namespace {

std::uint64_t fnv1a_bytes(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string CvCache::sieve_key(std::span<const double> y, int r0, int reps,
                               std::uint64_t seed, const WindowLagPolicy& policy) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a_bytes(y.data(), y.size_bytes(), h);
    h = fnv1a_bytes(&policy.fixed_lag, sizeof policy.fixed_lag, h);
    h = fnv1a_bytes(&policy.bic_max, sizeof policy.bic_max, h);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return "sieve_d" + std::string(hex) + "_T" + std::to_string(y.size()) + "_r" +
           std::to_string(r0) + "_n" + std::to_string(reps) + "_s" +
           std::to_string(seed);
}

std::string CvCache::path_for(const std::string& key) const {
    return (std::filesystem::path(dir_) / (key + ".csv")).string();
}

void CvCache::store(const std::string& key, const CvSimulation& sim) const {
    const std::string path = path_for(key);
    std::ofstream out(path);
    if (!out) throw io_error("cannot write cache file: " + path);
    out << "# replicate-level draws; bsadf_<i> is the trace value at end index i\n";
    out << "gsadf";
    for (std::size_t j = 0; j < (sim.bsadf_draws.empty() ? 0 : sim.bsadf_draws[0].size());
         ++j)
        out << ",bsadf_" << sim.trace_start + static_cast<int>(j);
    out << "\n";
    for (std::size_t r = 0; r < sim.gsadf_draws.size(); ++r) {
        out << format_double(sim.gsadf_draws[r]);
        for (double v : sim.bsadf_draws[r]) out << "," << format_double(v);
        out << "\n";
    }
}

std::optional<CvSimulation> CvCache::load(const std::string& key,
                                          std::span<const double> levels) const {
    const std::string path = path_for(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    const CsvTable table = read_csv_table(path);
    if (table.header.empty() || table.header[0] != "gsadf")
        throw io_error("malformed cache file: " + path);

    CvSimulation sim;
    if (table.header.size() > 1) {
        const std::string& first = table.header[1];
        if (first.rfind("bsadf_", 0) != 0) throw io_error("malformed cache file: " + path);
        sim.trace_start = std::stoi(first.substr(6));
    }
    sim.gsadf_draws.reserve(table.rows.size());
    sim.bsadf_draws.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw io_error("malformed cache row in: " + path);
        sim.gsadf_draws.push_back(std::stod(row[0]));
        std::vector<double> trace(row.size() - 1);
        for (std::size_t j = 1; j < row.size(); ++j) trace[j - 1] = std::stod(row[j]);
        sim.bsadf_draws.push_back(std::move(trace));
    }
    requantile(sim, levels);
    return sim;
}

}  // namespace bubble
