#include "bubble/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "adf_common.hpp"
#include "bubble/errors.hpp"
#include "bubble/stats.hpp"

namespace bubble {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd out(X.rows(), X.cols() + 1);
    out.col(0).setOnes();
    if (X.cols() > 0) out.rightCols(X.cols()) = X;
    return out;
}

RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                  bool add_intercept) {
    const Eigen::MatrixXd design = add_intercept ? with_intercept(X) : X;
    const Eigen::Index n = design.rows();
    const Eigen::Index k = design.cols();
    if (y.size() != n) throw std::invalid_argument("ols: y and X row counts differ");
    if (k == 0) throw std::invalid_argument("ols: empty design");
    if (n <= k) throw std::invalid_argument("ols: need n > k observations");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k)
        throw singular_design_error("ols: design matrix is rank deficient (rank " +
                                    std::to_string(qr.rank()) + " of " + std::to_string(k) +
                                    ")");

    RegressionFit fit;
    fit.coefficients = qr.solve(y);
    fit.fitted = design * fit.coefficients;
    fit.residuals = y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.dof = static_cast<long>(n - k);
    fit.sigma2 = fit.rss / static_cast<double>(fit.dof);

    const Eigen::MatrixXd xtx_inv =
        (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    fit.covariance = fit.sigma2 * xtx_inv;
    fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();
    return fit;
}

HacResult newey_west(const RegressionFit& fit, const Eigen::MatrixXd& X,
                     HACOptions opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (fit.residuals.size() != n || fit.coefficients.size() != k)
        throw std::invalid_argument("newey_west: fit and design are inconsistent");

    int L = opts.lag;
    if (L < 0) L = newey_west_auto_lag(static_cast<std::size_t>(n));
    if (L >= n) throw std::invalid_argument("newey_west: lag must be below n");

    const Eigen::VectorXd& e = fit.residuals;
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index t = 0; t < n; ++t)
        meat += e[t] * e[t] * X.row(t).transpose() * X.row(t);
    for (int j = 1; j <= L; ++j) {
        const double w = 1.0 - static_cast<double>(j) / static_cast<double>(L + 1);
        Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index t = j; t < n; ++t)
            gamma += e[t] * e[t - j] * X.row(t).transpose() * X.row(t - j);
        meat += w * (gamma + gamma.transpose());
    }

    const Eigen::MatrixXd bread =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    HacResult out;
    out.lag = L;
    out.covariance = bread * meat * bread;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    out.std_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.t_stats.resize(k);
    out.p_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        out.t_stats[j] = out.std_errors[j] > 0.0
                             ? fit.coefficients[j] / out.std_errors[j]
                             : std::numeric_limits<double>::infinity();
        out.p_values[j] = two_sided_normal_p(out.t_stats[j]);
    }
    return out;
}

namespace detail {

AdfRegressionResult adf_regression(std::span<const double> y, DeterministicSpec spec,
                                   int lags, int first_obs) {
    const int n = static_cast<int>(y.size());
    if (lags < 0) throw std::invalid_argument("adf_regression: negative lag");
    if (first_obs < lags + 1)
        throw std::invalid_argument("adf_regression: first_obs must be >= lags + 1");
    const int n_eff = n - first_obs;
    const int n_det = spec == DeterministicSpec::none ? 0
                      : spec == DeterministicSpec::constant ? 1
                                                            : 2;
    const int k = n_det + 1 + lags;
    if (n_eff <= k + 1)
        throw std::invalid_argument("adf_regression: insufficient observations");

    Eigen::VectorXd dy(n_eff);
    Eigen::MatrixXd X(n_eff, k);
    for (int t = first_obs; t < n; ++t) {
        const int r = t - first_obs;
        dy[r] = y[t] - y[t - 1];
        int c = 0;
        if (n_det >= 1) X(r, c++) = 1.0;
        if (n_det == 2) X(r, c++) = static_cast<double>(t);
        X(r, c++) = y[t - 1];
        for (int i = 1; i <= lags; ++i) X(r, c++) = y[t - i] - y[t - i - 1];
    }

    const RegressionFit fit = ols(dy, X);
    const int phi_col = n_det;
    AdfRegressionResult out;
    out.rss = fit.rss;
    out.n_eff = n_eff;
    out.n_params = k;
    const double se = std::sqrt(fit.covariance(phi_col, phi_col));
    out.t_stat = fit.coefficients[phi_col] / se;
    return out;
}

}  // namespace detail

int bic_lag_select(std::span<const double> y, int max_lag, DeterministicSpec spec) {
    if (max_lag < 0) throw std::invalid_argument("bic_lag_select: negative max_lag");
    const int n = static_cast<int>(y.size());
    if (n <= max_lag + 10)
        throw std::invalid_argument("bic_lag_select: need n > max_lag + 10");

    // All candidates share the sample implied by the largest lag.
    const int first_obs = max_lag + 1;
    int best_lag = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_lag; ++p) {
        const auto reg = detail::adf_regression(y, spec, p, first_obs);
        const double n_eff = static_cast<double>(reg.n_eff);
        const double bic = n_eff * std::log(reg.rss / n_eff) +
                           static_cast<double>(reg.n_params) * std::log(n_eff);
        if (bic < best_bic) {
            best_bic = bic;
            best_lag = p;
        }
    }
    return best_lag;
}

namespace {

// Scale-aware zero tests for the exact-fit corner of impulse saturation.
bool effectively_zero_rss(double rss, double y_sq_norm) {
    return rss <= 1e-24 * std::max(1.0, y_sq_norm);
}

double impulse_t_stat(double resid, double var, double y_scale) {
    if (var > 1e-24 * std::max(1.0, y_scale * y_scale)) return resid / std::sqrt(var);
    return std::abs(resid) > 1e-8 * std::max(1.0, y_scale)
               ? std::copysign(std::numeric_limits<double>::infinity(), resid)
               : 0.0;
}

}  // namespace

IisResult iis_outliers(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       double alpha, int blocks) {
    const Eigen::Index n = y.size();
    const Eigen::Index k = X.cols();
    if (X.rows() != n) throw std::invalid_argument("iis_outliers: y and X row counts differ");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("iis_outliers: alpha must lie in (0,1)");
    if (n <= 2 * (k + 1))
        throw std::invalid_argument("iis_outliers: need n > 2(k+1)");
    if (blocks < 2 || static_cast<Eigen::Index>(blocks) > n / 2)
        throw config_error("iis_outliers: block count out of range");

    const double z = normal_ppf(1.0 - alpha / 2.0);
    const double y_scale = std::sqrt(y.squaredNorm() / static_cast<double>(n));

    // Candidate scan. Saturating a block with impulse dummies makes the block
    // rows drop out of the estimation of beta, so the dummy t-statistics are
    // the standardized prediction errors of the complement fit.
    std::set<int> candidates;
    for (int b = 0; b < blocks; ++b) {
        const Eigen::Index lo = n * b / blocks;
        const Eigen::Index hi = n * (b + 1) / blocks;
        const Eigen::Index nc = n - (hi - lo);

        Eigen::VectorXd yc(nc);
        Eigen::MatrixXd Xc(nc, k);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i >= lo && i < hi) continue;
            yc[r] = y[i];
            Xc.row(r) = X.row(i);
            ++r;
        }
        const RegressionFit fitc = ols(yc, Xc);
        const double s2 = effectively_zero_rss(fitc.rss, y.squaredNorm())
                              ? 0.0
                              : fitc.rss / static_cast<double>(fitc.dof);
        const Eigen::MatrixXd xtx_inv =
            (Xc.transpose() * Xc).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
        for (Eigen::Index i = lo; i < hi; ++i) {
            const double resid = y[i] - X.row(i).dot(fitc.coefficients);
            const double h = X.row(i) * xtx_inv * X.row(i).transpose();
            const double t = impulse_t_stat(resid, s2 * (1.0 + h), y_scale);
            if (std::abs(t) > z) candidates.insert(static_cast<int>(i));
        }
    }

    // Joint re-estimation with the retained union, dropping insignificant
    // dummies until the set is stable.
    std::vector<int> retained(candidates.begin(), candidates.end());
    RegressionFit fit;
    Eigen::VectorXd t_stats;
    for (;;) {
        const Eigen::Index m = static_cast<Eigen::Index>(retained.size());
        if (n - k - m < 2)
            throw std::domain_error("iis_outliers: too few degrees of freedom left");
        Eigen::MatrixXd design(n, k + m);
        design.leftCols(k) = X;
        design.rightCols(m).setZero();
        for (Eigen::Index j = 0; j < m; ++j) design(retained[j], k + j) = 1.0;
        fit = ols(y, design);

        const bool exact = effectively_zero_rss(fit.rss, y.squaredNorm());
        t_stats.resize(m);
        std::vector<int> keep;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double beta = fit.coefficients[k + j];
            const double var = exact ? 0.0 : fit.covariance(k + j, k + j);
            t_stats[j] = impulse_t_stat(beta, var, y_scale);
            if (std::abs(t_stats[j]) > z) keep.push_back(retained[j]);
        }
        if (keep.size() == retained.size()) break;
        retained = std::move(keep);
    }

    return IisResult{std::move(retained), std::move(fit), std::move(t_stats)};
}

FourierFit fourier_deseason(const TimeSeries& ts, double cycles_per_year) {
    if (ts.size() < 3)
        throw std::invalid_argument("fourier_deseason: need at least 3 observations");
    const Eigen::Index n = static_cast<Eigen::Index>(ts.size());
    Eigen::VectorXd y(n);
    Eigen::MatrixXd X(n, 3);
    const double t0 = static_cast<double>(ts.date(0).serial());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t_years =
            (static_cast<double>(ts.date(i).serial()) - t0) / 365.25;
        y[i] = ts.value(i);
        X(i, 0) = 1.0;
        X(i, 1) = std::cos(2.0 * M_PI * cycles_per_year * t_years);
        X(i, 2) = std::sin(2.0 * M_PI * cycles_per_year * t_years);
    }
    const RegressionFit fit = ols(y, X);

    std::vector<double> resid(fit.residuals.data(), fit.residuals.data() + n);
    TimeSeries out(ts.dates(), std::move(resid), ts.frequency(), ts.units());
    out.metadata()["transform"] = "fourier_deseasonalized";
    return FourierFit{std::move(out), fit.coefficients[0], fit.coefficients[1],
                      fit.coefficients[2]};
}

SwitchingParams SwitchingParams::paper_profile() {
    SwitchingParams p;
    p.coal_unit_divisor = 8.14;
    return p;
}

TimeSeries switching_price(const TimeSeries& coal, const TimeSeries& gas,
                           const SwitchingParams& params) {
    if (coal.size() != gas.size() || coal.dates() != gas.dates())
        throw std::invalid_argument("switching_price: series must share timestamps");
    const double denom =
        params.eta_gas * params.f_coal - params.eta_coal * params.f_gas;
    if (denom == 0.0)
        throw config_error("switching_price: eta_gas*f_coal - eta_coal*f_gas is zero");
    if (params.coal_unit_divisor == 0.0)
        throw config_error("switching_price: coal unit divisor is zero");

    std::vector<double> values(coal.size());
    for (std::size_t i = 0; i < coal.size(); ++i) {
        const double p_coal = coal.value(i) / params.coal_unit_divisor;
        const double p_gas = gas.value(i);
        values[i] = (params.eta_coal * p_gas - params.eta_gas * p_coal) / denom;
    }
    return TimeSeries(coal.dates(), std::move(values), coal.frequency(), "EUR/tCO2");
}

}  // namespace bubble
