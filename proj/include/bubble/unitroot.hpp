#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bubble/deterministic.hpp"

namespace bubble {

struct UnitRootResult {
    std::string test;
    double statistic = 0.0;
    int lags = 0;  // augmentation lags (ADF/LNV); LRV bandwidth for PP/KPSS
    DeterministicSpec spec = DeterministicSpec::constant;
    double cv90 = 0.0, cv95 = 0.0, cv99 = 0.0;
    bool reject90 = false, reject95 = false, reject99 = false;
    bool right_tailed = false;
};

struct LagSelection {
    enum class Mode { fixed, bic_auto };
    Mode mode = Mode::bic_auto;
    int value = 8;  // the fixed lag, or the BIC search bound

    static LagSelection fixed(int lag) { return {Mode::fixed, lag}; }
    static LagSelection bic(int max_lag = 8) { return {Mode::bic_auto, max_lag}; }
};

/// Critical values at (90, 95, 99)% keyed by test and deterministic spec,
/// from the original papers' asymptotic tables.
std::array<double, 3> unit_root_critical_values(std::string_view test,
                                                DeterministicSpec spec);

/// Augmented Dickey-Fuller t-test; left-tailed.
UnitRootResult adf(std::span<const double> y, DeterministicSpec spec,
                   LagSelection lags = {});

/// Phillips-Perron Z-tau test; Bartlett long-run variance with the automatic
/// Newey-West bandwidth unless one is given. Same critical values as ADF.
UnitRootResult pp(std::span<const double> y, DeterministicSpec spec,
                  std::optional<int> bandwidth = std::nullopt);

/// KPSS stationarity test; right-tailed.
UnitRootResult kpss(std::span<const double> y, DeterministicSpec spec,
                    std::optional<int> bandwidth = std::nullopt);

/// Which deterministic terms receive the logistic transition.
enum class LnvVariant {
    mean_shift,             // alpha1 + alpha2 S
    mean_shift_with_trend,  // alpha1 + beta1 t + alpha2 S
    trend_shift             // alpha1 + beta1 t + (alpha2 + beta2 t) S
};

struct LnvConfig {
    LnvVariant variant = LnvVariant::trend_shift;
    std::vector<double> tau_grid;    // empty: 0.10 .. 0.90 step 0.05
    std::vector<double> gamma_grid;  // empty: log-spaced 0.5 .. 50 (12 points)
    int max_lag = 8;                 // BIC bound for the residual ADF step
    /// (90, 95, 99)% values; required for variants without a shipped table.
    std::optional<std::array<double, 3>> critical_values;
};

struct LnvTrendFit {
    double alpha1 = 0, beta1 = 0, alpha2 = 0, beta2 = 0;
    double gamma = 0, tau = 0;
    double ssr = 0;
    std::vector<double> residuals;
};

/// Fit the logistic smooth-transition trend by nonlinear least squares
/// (grid over (gamma, tau) with inner OLS, then a local refinement).
LnvTrendFit lnv_trend_fit(std::span<const double> y, const LnvConfig& config = {});

/// Leybourne-Newbold-Vougas smooth-transition unit root test: ADF statistic
/// on the NLS-detrended residuals; left-tailed.
UnitRootResult lnv(std::span<const double> y, const LnvConfig& config = {});

}  // namespace bubble
