#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bubble/deterministic.hpp"
#include "bubble/series.hpp"

namespace bubble {

/// Prepend a column of ones.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X);

struct RegressionFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    Eigen::MatrixXd covariance;  // classical homoskedastic sigma^2 (X'X)^-1
    double rss = 0.0;
    long dof = 0;  // n - k
    double sigma2 = 0.0;
};

/// Ordinary least squares. With add_intercept the ones column is prepended
/// and the intercept is the first coefficient. Throws singular_design_error
/// when X is rank deficient.
RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                  bool add_intercept = false);

struct HACOptions {
    int lag = -1;  // -1: automatic floor(4 (n/100)^{2/9})
};

struct HacResult {
    Eigen::MatrixXd covariance;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;  // two-sided, normal reference
    int lag = 0;
};

/// Newey-West (Bartlett-weighted) HAC covariance for an existing fit. X must
/// be the design actually used, including any intercept column. With lag 0
/// this reduces to the White heteroskedasticity-only covariance.
HacResult newey_west(const RegressionFit& fit, const Eigen::MatrixXd& X,
                     HACOptions opts = {});

/// ADF-regression lag order minimizing the BIC, all candidates evaluated on
/// the sample trimmed to the largest candidate lag.
int bic_lag_select(std::span<const double> y, int max_lag, DeterministicSpec spec);

struct IisResult {
    std::vector<int> outliers;      // retained impulse positions, ascending
    RegressionFit augmented_fit;    // y on [X, impulse dummies]
    Eigen::VectorXd dummy_t_stats;  // aligned with `outliers`
};

/// Impulse indicator saturation: block-wise dummy saturation (default two
/// blocks), retention at the two-sided normal alpha quantile, then a joint
/// re-estimation that iteratively drops insignificant dummies. X is the full
/// design (pass a ones column for an intercept-only search).
IisResult iis_outliers(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       double alpha, int blocks = 2);

struct FourierFit {
    TimeSeries residuals;
    double intercept = 0.0;
    double cos_coef = 0.0;  // on cos(2*pi*c*t), t in years
    double sin_coef = 0.0;
};

/// Remove an annual (or c-cycles-per-year) seasonal component by regressing
/// on a Fourier pair plus intercept; the time index is years since the first
/// observation.
FourierFit fourier_deseason(const TimeSeries& ts, double cycles_per_year = 1.0);

struct SwitchingParams {
    double eta_coal = 0.36;
    double eta_gas = 0.47;
    double f_coal = 0.338;  // tCO2/MWh
    double f_gas = 0.202;
    double coal_unit_divisor = 1.0;  // applied to the coal series before the formula

    /// Standard profile: the constants above with the API2 USD-per-tonne
    /// conversion divisor 8.14.
    static SwitchingParams paper_profile();
};

/// Coal-to-gas fuel switching price, pointwise:
///   (eta_coal * p_gas - eta_gas * p_coal) / (eta_gas * f_coal - eta_coal * f_gas).
TimeSeries switching_price(const TimeSeries& coal, const TimeSeries& gas,
                           const SwitchingParams& params);

}  // namespace bubble
