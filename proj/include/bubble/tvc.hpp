#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace bubble {

enum class KernelType { epanechnikov };

/// K(x) = 3/4 (1 - x^2) on [-1, 1].
double epanechnikov(double x);
double kernel_eval(KernelType kernel, double x);

/// Pilot bandwidth for the bootstrap residual fit: 0.5 * h^{5/9}.
double oversmooth_bandwidth(double h);

struct CoefficientCurves {
    std::vector<double> grid;     // tau points in (0, 1]
    Eigen::MatrixXd estimates;    // grid x coefficients
    Eigen::MatrixXd derivatives;  // same shape
    double bandwidth = 0.0;
    KernelType kernel = KernelType::epanechnikov;
    std::vector<std::uint8_t> boundary;  // tau within h of 0 or 1
};

/// Per-tau weighted designs for a fixed regressor matrix, bandwidth and
/// grid. Building the plan factorizes every local problem once; each fit for
/// a new response is then a cheap matrix-vector product, which is what makes
/// the bootstrap affordable.
class LocalLinearPlan {
public:
    /// X must contain the intercept column. Grid points map the sample to
    /// tau = (t+1)/n; pass an empty grid for exactly that default.
    LocalLinearPlan(const Eigen::MatrixXd& X, double h,
                    KernelType kernel = KernelType::epanechnikov,
                    std::vector<double> grid = {});
    ~LocalLinearPlan();
    LocalLinearPlan(LocalLinearPlan&&) noexcept;
    LocalLinearPlan& operator=(LocalLinearPlan&&) noexcept;

    const std::vector<double>& grid() const;
    double bandwidth() const;
    int n_obs() const;
    int n_coef() const;

    CoefficientCurves fit(const Eigen::VectorXd& y) const;

    /// x_t' beta(tau_t); requires the default sample-point grid.
    Eigen::VectorXd fitted_values(const Eigen::VectorXd& y) const;

    /// Diagonal of the smoother (hat) matrix; default grid only.
    double hat_diag(int t) const;

    /// Prediction of y_t from a fit at tau_t that omits observations
    /// [t-l, t+l]; NaN when the reduced local design is singular.
    double leave_out_prediction(const Eigen::VectorXd& y, int t, int l) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

CoefficientCurves local_linear_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                   double h, KernelType kernel = KernelType::epanechnikov,
                                   std::vector<double> grid = {});

struct AwbConfig {
    double gamma = 0.0;  // <= 0: 0.01^(1/l*), l* = ceil(1.75 n^{1/3})
    int B = 999;
    std::uint64_t seed = 0;
};

double awb_default_gamma(int n);

struct BandSet {
    std::vector<double> grid;
    Eigen::MatrixXd lower;  // grid x coefficients
    Eigen::MatrixXd upper;
    double level = 0.0;     // percent
    int B = 0;
    double gamma = 0.0;
    double h_tilde = 0.0;
};

/// Autoregressive wild bootstrap pointwise confidence bands around the
/// local-linear estimates at bandwidth h. Deterministic given the seed.
BandSet awb_bands(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double h,
                  const AwbConfig& config, double level = 95.0,
                  KernelType kernel = KernelType::epanechnikov, int threads = 0);

enum class BandwidthMethod { cv, gcv, mcv, aic };

struct BandwidthSelection {
    double h = 0.0;
    std::vector<double> grid;
    std::vector<double> criterion;  // aligned with grid
};

/// Data-driven bandwidth choice over a grid; ties break toward the larger
/// bandwidth. `leave_out` is the l of the leave-(2l+1)-out criterion and
/// only affects mcv.
BandwidthSelection select_bandwidth(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                    BandwidthMethod method, std::span<const double> h_grid,
                                    int leave_out = 4,
                                    KernelType kernel = KernelType::epanechnikov);

struct GridInterval {
    int start_index = 0;
    int end_index = 0;
};

/// Per coefficient, the maximal grid intervals on which zero lies outside
/// the band.
std::vector<std::vector<GridInterval>> significance_periods(const BandSet& bands);

}  // namespace bubble
