#include "bubble/unitroot.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "adf_common.hpp"
#include "bubble/errors.hpp"
#include "bubble/regress.hpp"
#include "bubble/stats.hpp"

namespace bubble {

std::string_view to_string(DeterministicSpec spec) {
    switch (spec) {
        case DeterministicSpec::none: return "none";
        case DeterministicSpec::constant: return "constant";
        case DeterministicSpec::constant_trend: return "constant+trend";
    }
    return "constant";
}

std::array<double, 3> unit_root_critical_values(std::string_view test,
                                                DeterministicSpec spec) {
    // Dickey-Fuller (1979) / MacKinnon asymptotic tables; KPSS (1992); LNV
    // (1998) trend-shift model.
    if (test == "adf" || test == "pp") {
        switch (spec) {
            case DeterministicSpec::none: return {-1.62, -1.95, -2.58};
            case DeterministicSpec::constant: return {-2.57, -2.86, -3.43};
            case DeterministicSpec::constant_trend: return {-3.13, -3.42, -3.98};
        }
    }
    if (test == "kpss") {
        switch (spec) {
            case DeterministicSpec::constant: return {0.347, 0.463, 0.739};
            case DeterministicSpec::constant_trend: return {0.12, 0.15, 0.22};
            case DeterministicSpec::none:
                throw config_error("kpss requires a constant or trend specification");
        }
    }
    if (test == "lnv") return {-4.55, -4.83, -5.42};
    throw config_error("no critical values for test '" + std::string(test) + "'");
}

namespace {

UnitRootResult make_result(std::string test, double stat, int lags,
                           DeterministicSpec spec, std::array<double, 3> cv,
                           bool right_tailed) {
    UnitRootResult r;
    r.test = std::move(test);
    r.statistic = stat;
    r.lags = lags;
    r.spec = spec;
    r.cv90 = cv[0];
    r.cv95 = cv[1];
    r.cv99 = cv[2];
    r.right_tailed = right_tailed;
    if (right_tailed) {
        r.reject90 = stat > cv[0];
        r.reject95 = stat > cv[1];
        r.reject99 = stat > cv[2];
    } else {
        r.reject90 = stat < cv[0];
        r.reject95 = stat < cv[1];
        r.reject99 = stat < cv[2];
    }
    return r;
}

// Residuals from regressing y on the deterministic terms alone.
Eigen::VectorXd detrend(std::span<const double> y, DeterministicSpec spec) {
    const Eigen::Index n = static_cast<Eigen::Index>(y.size());
    Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    if (spec == DeterministicSpec::none) return yy;
    const int n_det = spec == DeterministicSpec::constant ? 1 : 2;
    Eigen::MatrixXd X(n, n_det);
    for (Eigen::Index t = 0; t < n; ++t) {
        X(t, 0) = 1.0;
        if (n_det == 2) X(t, 1) = static_cast<double>(t + 1);
    }
    return ols(yy, X).residuals;
}

}  // namespace

UnitRootResult adf(std::span<const double> y, DeterministicSpec spec,
                   LagSelection lags) {
    const int n = static_cast<int>(y.size());
    int p = lags.value;
    if (lags.mode == LagSelection::Mode::bic_auto) {
        if (n <= lags.value + 10)
            throw std::invalid_argument("adf: series too short for BIC lag search");
        p = bic_lag_select(y, lags.value, spec);
    }
    if (n < p + 12) throw std::invalid_argument("adf: need n >= lags + 12");
    const auto reg = detail::adf_regression(y, spec, p, p + 1);
    return make_result("adf", reg.t_stat, p, spec,
                       unit_root_critical_values("adf", spec), false);
}

UnitRootResult pp(std::span<const double> y, DeterministicSpec spec,
                  std::optional<int> bandwidth) {
    const int n = static_cast<int>(y.size());
    if (n < 25) throw std::invalid_argument("pp: need n >= 25");

    // Lag-0 Dickey-Fuller regression, then the serial-correlation correction.
    const int n_det = spec == DeterministicSpec::none ? 0
                      : spec == DeterministicSpec::constant ? 1
                                                            : 2;
    const int n_eff = n - 1;
    Eigen::VectorXd dy(n_eff);
    Eigen::MatrixXd X(n_eff, n_det + 1);
    for (int t = 1; t < n; ++t) {
        const int r = t - 1;
        dy[r] = y[t] - y[t - 1];
        int c = 0;
        if (n_det >= 1) X(r, c++) = 1.0;
        if (n_det == 2) X(r, c++) = static_cast<double>(t);
        X(r, c) = y[t - 1];
    }
    const RegressionFit fit = ols(dy, X);
    const int phi_col = n_det;
    const double se_phi = std::sqrt(fit.covariance(phi_col, phi_col));
    const double t_stat = fit.coefficients[phi_col] / se_phi;

    const int q = bandwidth.value_or(newey_west_auto_lag(static_cast<std::size_t>(n_eff)));
    const std::span<const double> u(fit.residuals.data(),
                                    static_cast<std::size_t>(n_eff));
    const double gamma0 = fit.rss / static_cast<double>(n_eff);
    const double lambda2 = bartlett_long_run_variance(u, q);
    const double s2 = fit.sigma2;

    const double stat = std::sqrt(gamma0 / lambda2) * t_stat -
                        0.5 * (lambda2 - gamma0) / std::sqrt(lambda2) *
                            (static_cast<double>(n_eff) * se_phi / std::sqrt(s2));
    return make_result("pp", stat, q, spec, unit_root_critical_values("pp", spec),
                       false);
}

UnitRootResult kpss(std::span<const double> y, DeterministicSpec spec,
                    std::optional<int> bandwidth) {
    const int n = static_cast<int>(y.size());
    if (n < 25) throw std::invalid_argument("kpss: need n >= 25");
    if (spec == DeterministicSpec::none)
        throw config_error("kpss requires a constant or trend specification");

    const Eigen::VectorXd e = detrend(y, spec);
    const int q = bandwidth.value_or(newey_west_auto_lag(static_cast<std::size_t>(n)));
    const double lrv =
        bartlett_long_run_variance({e.data(), static_cast<std::size_t>(n)}, q);

    double s = 0.0, sum_s2 = 0.0;
    for (int t = 0; t < n; ++t) {
        s += e[t];
        sum_s2 += s * s;
    }
    const double stat = sum_s2 / (static_cast<double>(n) * n * lrv);
    return make_result("kpss", stat, q, spec,
                       unit_root_critical_values("kpss", spec), true);
}

namespace {

double logistic_transition(double u, double gamma, double tau) {
    return 1.0 / (1.0 + std::exp(-gamma * (u - tau)));
}

// Inner OLS of the smooth-transition trend for fixed (gamma, tau); returns
// the SSR and, optionally, the linear coefficients and residuals.
double lnv_inner_ols(std::span<const double> y, LnvVariant variant, double gamma,
                     double tau, LnvTrendFit* out) {
    const Eigen::Index n = static_cast<Eigen::Index>(y.size());
    const int k = variant == LnvVariant::mean_shift ? 2
                  : variant == LnvVariant::mean_shift_with_trend ? 3
                                                                 : 4;
    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const double u = static_cast<double>(t + 1) / static_cast<double>(n);
        const double s = logistic_transition(u, gamma, tau);
        int c = 0;
        X(t, c++) = 1.0;
        if (variant != LnvVariant::mean_shift) X(t, c++) = static_cast<double>(t + 1);
        X(t, c++) = s;
        if (variant == LnvVariant::trend_shift) X(t, c++) = static_cast<double>(t + 1) * s;
    }
    RegressionFit fit;
    try {
        fit = ols(yy, X);
    } catch (const singular_design_error&) {
        return std::numeric_limits<double>::infinity();
    }
    if (out) {
        out->alpha1 = fit.coefficients[0];
        int c = 1;
        out->beta1 = variant == LnvVariant::mean_shift ? 0.0 : fit.coefficients[c++];
        out->alpha2 = fit.coefficients[c++];
        out->beta2 = variant == LnvVariant::trend_shift ? fit.coefficients[c] : 0.0;
        out->gamma = gamma;
        out->tau = tau;
        out->ssr = fit.rss;
        out->residuals.assign(fit.residuals.data(), fit.residuals.data() + n);
    }
    return fit.rss;
}

}  // namespace

LnvTrendFit lnv_trend_fit(std::span<const double> y, const LnvConfig& config) {
    if (y.size() < 50) throw std::invalid_argument("lnv: need n >= 50");

    std::vector<double> taus = config.tau_grid;
    if (taus.empty())
        for (double t = 0.10; t <= 0.901; t += 0.05) taus.push_back(t);
    std::vector<double> gammas = config.gamma_grid;
    if (gammas.empty()) {
        const int points = 12;
        const double lo = std::log(0.5), hi = std::log(50.0);
        for (int i = 0; i < points; ++i)
            gammas.push_back(std::exp(lo + (hi - lo) * i / (points - 1)));
    }
    if (taus.size() < 2 || gammas.size() < 2)
        throw std::invalid_argument("lnv: degenerate (gamma, tau) grid");

    double best_ssr = std::numeric_limits<double>::infinity();
    double best_gamma = gammas.front(), best_tau = taus.front();
    double gamma_step = 0.0, tau_step = 0.0;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        for (std::size_t j = 0; j < taus.size(); ++j) {
            const double ssr = lnv_inner_ols(y, config.variant, gammas[i], taus[j], nullptr);
            if (ssr < best_ssr) {
                best_ssr = ssr;
                best_gamma = gammas[i];
                best_tau = taus[j];
            }
        }
    }
    gamma_step = std::log(gammas[1] / gammas[0]);
    tau_step = taus[1] - taus[0];

    // Local polish: shrinking 5x5 grids around the incumbent (gamma searched
    // in log space).
    for (int round = 0; round < 3; ++round) {
        gamma_step *= 0.5;
        tau_step *= 0.5;
        double round_gamma = best_gamma, round_tau = best_tau;
        for (int a = -2; a <= 2; ++a) {
            for (int b = -2; b <= 2; ++b) {
                const double g = best_gamma * std::exp(gamma_step * a / 2.0);
                const double t = std::clamp(best_tau + tau_step * b / 2.0, 0.01, 0.99);
                const double ssr = lnv_inner_ols(y, config.variant, g, t, nullptr);
                if (ssr < best_ssr) {
                    best_ssr = ssr;
                    round_gamma = g;
                    round_tau = t;
                }
            }
        }
        best_gamma = round_gamma;
        best_tau = round_tau;
    }

    LnvTrendFit fit;
    lnv_inner_ols(y, config.variant, best_gamma, best_tau, &fit);
    return fit;
}

UnitRootResult lnv(std::span<const double> y, const LnvConfig& config) {
    const LnvTrendFit trend = lnv_trend_fit(y, config);

    // ADF-type regression on the detrended residuals, no deterministic terms.
    const int n = static_cast<int>(trend.residuals.size());
    int max_lag = std::min(config.max_lag, n / 4);
    const int p = bic_lag_select(trend.residuals, max_lag, DeterministicSpec::none);
    const auto reg =
        detail::adf_regression(trend.residuals, DeterministicSpec::none, p, p + 1);

    std::array<double, 3> cv{};
    if (config.critical_values) {
        cv = *config.critical_values;
    } else if (config.variant == LnvVariant::trend_shift) {
        cv = unit_root_critical_values("lnv", DeterministicSpec::constant_trend);
    } else {
        throw config_error(
            "lnv: no shipped critical values for this variant; set "
            "LnvConfig::critical_values");
    }
    return make_result("lnv", reg.t_stat, p, DeterministicSpec::constant_trend, cv,
                       false);
}

}  // namespace bubble
