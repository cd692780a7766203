#include "bubble/noncausal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bubble/regress.hpp"

namespace bubble {

void StableParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("StableParams: alpha must lie in (0, 2]");
    if (!(beta >= -1.0 && beta <= 1.0))
        throw std::invalid_argument("StableParams: beta must lie in [-1, 1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("StableParams: sigma must be positive");
}

double stable_draw(const StableParams& params, Rng& rng) {
    const double u = M_PI * (rng.uniform01() - 0.5);  // uniform on (-pi/2, pi/2)
    const double w = rng.exponential();
    const double alpha = params.alpha;
    const double beta = params.beta;

    if (alpha == 1.0) {
        const double a = M_PI_2 + beta * u;
        const double x =
            (a * std::tan(u) -
             beta * std::log((M_PI_2 * w * std::cos(u)) / a)) /
            M_PI_2;
        double out = params.sigma * x + params.mu;
        if (params.sigma != 1.0)
            out += M_2_PI * beta * params.sigma * std::log(params.sigma);
        return out;
    }

    const double zeta = beta * std::tan(M_PI_2 * alpha);
    const double b0 = std::atan(zeta) / alpha;
    const double s0 = std::pow(1.0 + zeta * zeta, 0.5 / alpha);
    const double x = s0 * std::sin(alpha * (u + b0)) /
                     std::pow(std::cos(u), 1.0 / alpha) *
                     std::pow(std::cos(u - alpha * (u + b0)) / w, (1.0 - alpha) / alpha);
    return params.sigma * x + params.mu;
}

std::vector<double> stable_sample(const StableParams& params, std::size_t n,
                                  std::uint64_t seed) {
    params.validate();
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = stable_draw(params, rng);
    return out;
}

void NoncausalAr1::validate() const {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("NoncausalAr1: rho must lie in (0, 1)");
    shocks.validate();
}

std::vector<double> simulate_noncausal_ar1(const NoncausalAr1& model, std::size_t n,
                                           int truncation, std::uint64_t seed) {
    model.validate();
    if (truncation < 1)
        throw std::invalid_argument("simulate_noncausal_ar1: truncation must be >= 1");
    if (n == 0) return {};

    Rng rng(seed);
    const std::size_t total = n + static_cast<std::size_t>(truncation);
    std::vector<double> shocks(total);
    for (std::size_t i = 0; i < total; ++i) shocks[i] = stable_draw(model.shocks, rng);

    // Backward recursion gives the truncated forward MA in one pass; every
    // kept point sums at least `truncation` shock terms.
    std::vector<double> path(n);
    double acc = 0.0;
    for (std::size_t i = total; i-- > 0;) {
        acc = shocks[i] + model.rho * acc;
        if (i < n) path[i] = acc;
    }
    return path;
}

TrendFit fit_exponential_trend(const TimeSeries& prices, Date from, Date to) {
    if (to < from)
        throw std::invalid_argument("fit_exponential_trend: window end before start");
    constexpr double kDaysPerMonth = 365.25 / 12.0;

    std::vector<double> t_months;
    std::vector<double> log_p;
    Date first, last;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        const Date& d = prices.date(i);
        if (d < from || to < d) continue;
        if (!(prices.value(i) > 0.0))
            throw std::domain_error("fit_exponential_trend: non-positive price at " +
                                    d.to_string());
        if (t_months.empty()) first = d;
        last = d;
        t_months.push_back(
            static_cast<double>(d.serial() - first.serial()) / kDaysPerMonth);
        log_p.push_back(std::log(prices.value(i)));
    }
    const int n = static_cast<int>(log_p.size());
    if (n < 8)
        throw std::invalid_argument(
            "fit_exponential_trend: need at least 8 observations in the window");

    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(log_p.data(), n);
    Eigen::MatrixXd X(n, 2);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = t_months[i];
    }
    const RegressionFit fit = ols(y, X);
    const double tss = (y.array() - y.mean()).square().sum();

    TrendFit out;
    out.slope_per_month = fit.coefficients[1];
    out.intercept = fit.coefficients[0];
    out.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : 1.0;
    out.window_start = first;
    out.window_end = last;
    out.n_obs = n;
    return out;
}

double rho_from_growth(double monthly_growth) {
    if (!(monthly_growth > 0.0))
        throw std::domain_error("no explosive trend: growth rate must be positive");
    return std::exp(-monthly_growth);
}

namespace {

void validate_odds_params(double rho, double alpha) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("crash odds: rho must lie in (0, 1)");
    if (!(alpha >= 0.5 && alpha <= 2.0))
        throw std::domain_error("crash odds: alpha must lie in [0.5, 2]");
}

}  // namespace

double half_life(double rho, double alpha) {
    validate_odds_params(rho, alpha);
    return -std::log(2.0) / (alpha * std::log(rho));
}

double crash_odds(double rho, double alpha, double horizon_months) {
    validate_odds_params(rho, alpha);
    if (horizon_months < 0.0)
        throw std::domain_error("crash odds: horizon must be nonnegative");
    return 1.0 - std::pow(rho, alpha * horizon_months);
}

double expected_duration(double rho, double alpha) {
    validate_odds_params(rho, alpha);
    return 1.0 / (1.0 - std::pow(rho, alpha));
}

CrashOddsReport crash_odds_report(const TrendFit& fit, double alpha_lo, double alpha_hi,
                                  std::span<const double> horizons) {
    if (alpha_lo > alpha_hi)
        throw std::invalid_argument("crash_odds_report: alpha range reversed");
    const double rho = rho_from_growth(fit.slope_per_month);
    validate_odds_params(rho, alpha_lo);
    validate_odds_params(rho, alpha_hi);

    CrashOddsReport report;
    report.growth_rate = fit.slope_per_month;
    report.rho = rho;
    report.alpha_lo = alpha_lo;
    report.alpha_hi = alpha_hi;
    report.horizons.assign(horizons.begin(), horizons.end());
    for (double h : horizons) {
        const double lo = crash_odds(rho, alpha_lo, h);
        const double hi = crash_odds(rho, alpha_hi, h);
        report.lower_odds.push_back(std::min(lo, hi));
        report.upper_odds.push_back(std::max(lo, hi));
    }
    const double hl_lo = half_life(rho, alpha_lo), hl_hi = half_life(rho, alpha_hi);
    report.half_life_min = std::min(hl_lo, hl_hi);
    report.half_life_max = std::max(hl_lo, hl_hi);
    const double ed_lo = expected_duration(rho, alpha_lo);
    const double ed_hi = expected_duration(rho, alpha_hi);
    report.duration_min = std::min(ed_lo, ed_hi);
    report.duration_max = std::max(ed_lo, ed_hi);
    return report;
}

}  // namespace bubble
