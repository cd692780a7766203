#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bubble/rng.hpp"

namespace bubble {

/// Default minimum window: floor(T * (0.01 + 1.8/sqrt(T))) observations.
int min_window_rule(int T);

/// Minimum episode duration: ceil(ln T) observations.
int min_duration_rule(int T);

/// Lag order used inside the windowed regressions: a fixed lag, or a
/// per-window BIC search up to `bic_max`.
struct WindowLagPolicy {
    int fixed_lag = 0;
    int bic_max = -1;  // >= 0 enables per-window BIC

    static WindowLagPolicy fixed(int lag) { return {lag, -1}; }
    static WindowLagPolicy per_window_bic(int max_lag = 8) { return {0, max_lag}; }
};

/// Right-tailed ADF t-statistic of the constant-spec regression on the
/// inclusive observation window [first, last].
double adf_window(std::span<const double> y, int first, int last, int lags = 0);

/// Rolling-window ADF statistics backed by prefix-sum cross products, so a
/// single window evaluates in O(lags^3) regardless of its width. Windows
/// whose local regression is singular or too short evaluate to -infinity.
class WindowScan {
public:
    WindowScan(std::span<const double> y, WindowLagPolicy policy = {});
    ~WindowScan();
    WindowScan(WindowScan&&) noexcept;
    WindowScan& operator=(WindowScan&&) noexcept;

    int size() const { return n_; }
    double stat(int first, int last) const;

private:
    struct Engine;

    int n_ = 0;
    WindowLagPolicy policy_;
    std::vector<Engine> engines_;
};

double sadf(std::span<const double> y, int r0, WindowLagPolicy policy = {});
double gsadf(std::span<const double> y, int r0, WindowLagPolicy policy = {});

/// Backward sup-ADF statistic per end index. stats[j] is the statistic for
/// end index start_index + j; start_index = r0 - 1, the first end index with
/// a full minimum window.
struct BsadfTrace {
    int start_index = 0;
    std::vector<double> stats;
    std::vector<double> cv;  // aligned critical-value sequence (may be empty)
    double level = 0.0;      // percent level of cv
};

BsadfTrace bsadf_sequence(std::span<const double> y, int r0,
                          WindowLagPolicy policy = {});

/// Null model y_t = d*T^{-eta} + theta*y_{t-1} + e_t with standard normal
/// errors and y_0 = 0.
struct NullDgpConfig {
    double d = 1.0;
    double eta = 1.0;
    double theta = 1.0;
    int T = 0;
};

std::vector<double> simulate_psy_null(const NullDgpConfig& config, Rng& rng);

/// Replicate-level simulation output: quantiles at the requested levels plus
/// the raw draws, so further levels can be derived without re-simulation.
struct CvSimulation {
    std::vector<double> levels;                    // percent, ascending
    std::vector<double> gsadf_cv;                  // per level
    std::vector<std::vector<double>> bsadf_cv;     // [level][trace index]
    int trace_start = 0;                           // first defined end index
    std::vector<double> gsadf_draws;               // per replicate
    std::vector<std::vector<double>> bsadf_draws;  // [replicate][trace index]
};

/// Monte-Carlo critical values under the null DGP (d = eta = theta = 1),
/// lag 0 inside windows. Deterministic given the seed, independent of the
/// worker count.
CvSimulation mc_critical_values(int T, int r0, int reps,
                                std::span<const double> levels,
                                std::uint64_t seed, int threads = 0);

/// Sieve-bootstrap critical values: an AR sieve (BIC order) fitted to the
/// first differences, centered residuals resampled with replacement, levels
/// rebuilt under the unit-root null without drift.
CvSimulation sieve_bootstrap_cvs(std::span<const double> y, int r0, int reps,
                                 std::span<const double> levels,
                                 std::uint64_t seed, WindowLagPolicy policy = {},
                                 int threads = 0);

/// Recompute the quantile summaries of a simulation at new levels.
void requantile(CvSimulation& sim, std::span<const double> levels);

struct Episode {
    int start_index = 0;
    int end_index = 0;
    bool ongoing = false;
    double peak_stat = 0.0;

    int duration() const { return end_index - start_index + 1; }
};

/// Maximal runs where the statistic exceeds its critical value for at least
/// min_duration consecutive observations. A run reaching the final trace
/// date is flagged ongoing.
std::vector<Episode> date_stamp(const BsadfTrace& trace, int min_duration);

/// Draw-level disk cache, one CSV per key. New quantile levels are served
/// from the stored draws.
class CvCache {
public:
    explicit CvCache(std::string dir);

    static std::string mc_key(int T, int r0, int reps, std::uint64_t seed);
    static std::string sieve_key(std::span<const double> y, int r0, int reps,
                                 std::uint64_t seed, const WindowLagPolicy& policy);

    std::optional<CvSimulation> load(const std::string& key,
                                     std::span<const double> levels) const;
    void store(const std::string& key, const CvSimulation& sim) const;
    std::string path_for(const std::string& key) const;

private:
    std::string dir_;
};

}  // namespace bubble
