#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bubble/date.hpp"
#include "bubble/rng.hpp"
#include "bubble/series.hpp"

namespace bubble {

/// Alpha-stable law S(alpha, beta, sigma, mu) in the parameterisation whose
/// characteristic function is
///   exp{ -sigma^a |u|^a (1 - i beta sign(u) w(a,u)) + i u mu },
/// w(a,u) = tan(pi a / 2) for a != 1 and -(2/pi) ln|u| at a = 1.
struct StableParams {
    double alpha = 2.0;  // tail index, (0, 2]
    double beta = 0.0;   // asymmetry, [-1, 1]
    double sigma = 1.0;  // scale, > 0
    double mu = 0.0;     // location

    void validate() const;
};

/// One draw via the Chambers-Mallows-Stuck transform (logarithmic branch at
/// alpha = 1).
double stable_draw(const StableParams& params, Rng& rng);

std::vector<double> stable_sample(const StableParams& params, std::size_t n,
                                  std::uint64_t seed);

/// Noncausal AR(1): the strictly stationary solution of X_t = rho X_{t+1} + e_t.
struct NoncausalAr1 {
    double rho = 0.95;
    StableParams shocks;

    void validate() const;
};

/// Path of length n through the truncated forward moving average
/// X_t = sum_{k>=0} rho^k e_{t+k}, using n + truncation shocks; the
/// truncation error is bounded by rho^{truncation+1} max|e| / (1 - rho).
std::vector<double> simulate_noncausal_ar1(const NoncausalAr1& model, std::size_t n,
                                           int truncation, std::uint64_t seed);

struct TrendFit {
    double slope_per_month = 0.0;  // a in ln p = a t + b, t in months
    double intercept = 0.0;
    double r_squared = 0.0;
    Date window_start;
    Date window_end;
    int n_obs = 0;
};

/// Exponential trend on a price window: OLS of log prices on time measured
/// in months (30.4375 days each).
TrendFit fit_exponential_trend(const TimeSeries& prices, Date from, Date to);

/// rho = exp(-a); requires a > 0 (an explosive upward trend).
double rho_from_growth(double monthly_growth);

/// Half-life -ln2 / (alpha ln rho), in months.
double half_life(double rho, double alpha);

/// Probability of a crash within h months: 1 - rho^(alpha h).
double crash_odds(double rho, double alpha, double horizon_months);

/// Expected episode length 1 / (1 - rho^alpha), in months.
double expected_duration(double rho, double alpha);

struct CrashOddsReport {
    double growth_rate = 0.0;  // monthly
    double rho = 0.0;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    std::vector<double> horizons;     // months
    std::vector<double> lower_odds;   // per horizon
    std::vector<double> upper_odds;
    double half_life_min = 0.0, half_life_max = 0.0;
    double duration_min = 0.0, duration_max = 0.0;
};

/// Crash-odds bounds over a tail-index bracket; the odds are monotone in
/// alpha, so the bracket endpoints bound every interior value.
CrashOddsReport crash_odds_report(const TrendFit& fit, double alpha_lo, double alpha_hi,
                                  std::span<const double> horizons);

}  // namespace bubble
