#include "fdk/fracquad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdk {

GradedGrid graded_grid(int J, double sigma, double T) {
    if (J < 2) throw std::invalid_argument("graded_grid: J must be >= 2");
    if (!(sigma >= 1.0)) throw std::invalid_argument("graded_grid: sigma must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("graded_grid: T must be positive");
    GradedGrid g;
    g.J = J;
    g.sigma = sigma;
    g.T = T;
    g.times.resize(J + 1);
    g.times[0] = 0.0;
    for (int j = 1; j < J; ++j) g.times[j] = std::pow(double(j) / J, sigma) * T;
    g.times[J] = T;  // not via pow: t_J must equal T bit-exactly
    g.taus.resize(J);
    for (int j = 1; j <= J; ++j) g.taus[j - 1] = g.times[j] - g.times[j - 1];
    return g;
}

GradedGrid grid_from_breakpoints(std::vector<double> times) {
    if (times.size() < 2 || times.front() != 0.0)
        throw std::invalid_argument("grid_from_breakpoints: need t_0 = 0 and at least one interval");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("grid_from_breakpoints: times must increase strictly");
    GradedGrid g;
    g.J = static_cast<int>(times.size()) - 1;
    g.sigma = std::nan("");
    g.T = times.back();
    g.taus.resize(g.J);
    for (int j = 1; j <= g.J; ++j) g.taus[j - 1] = times[j] - times[j - 1];
    g.times = std::move(times);
    return g;
}

std::vector<double> conv_weights_row(const GradedGrid& grid, double alpha, int j) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("conv_weights_row: alpha must lie in (0,1)");
    if (j < 1 || j > grid.J) throw std::invalid_argument("conv_weights_row: j out of range");
    const double e = 1.0 - alpha;
    const double rg = 1.0 / std::tgamma(2.0 - alpha);
    // Shared power arrays for the row: Q(m) = (t_j - t_m)^{1-a},
    // R(m) = (t_{j-1} - t_m)^{1-a}. Differencing within each array keeps the
    // cancellation confined to values computed from the same base point.
    std::vector<double> Q(j + 1), R(j);
    for (int m = 0; m < j; ++m) Q[m] = std::pow(grid.times[j] - grid.times[m], e);
    Q[j] = 0.0;
    for (int m = 0; m + 1 < j; ++m) R[m] = std::pow(grid.times[j - 1] - grid.times[m], e);
    if (j >= 1) R[j - 1] = 0.0;
    std::vector<double> b(j);
    for (int k = 1; k < j; ++k) b[k - 1] = ((Q[k - 1] - Q[k]) - (R[k - 1] - R[k])) * rg;
    b[j - 1] = Q[j - 1] * rg;  // only the (t_j - t_{j-1}) term survives
    return b;
}

ConvWeights::ConvWeights(GradedGrid grid, double alpha)
    : grid_(std::move(grid)), alpha_(alpha), caching_(grid_.J <= 4096) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ConvWeights: alpha must lie in (0,1)");
    if (caching_) rows_.resize(grid_.J + 1);  // sized once: row pointers stay stable
}

const std::vector<double>& ConvWeights::row(int j, std::vector<double>& scratch) const {
    if (!caching_) {
        scratch = conv_weights_row(grid_, alpha_, j);
        return scratch;
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (rows_[j]) return *rows_[j];
    }
    auto fresh = std::make_unique<const std::vector<double>>(conv_weights_row(grid_, alpha_, j));
    std::lock_guard<std::mutex> lock(mu_);
    if (!rows_[j]) rows_[j] = std::move(fresh);
    return *rows_[j];
}

double stability_bound(double alpha, double L) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("stability_bound: alpha must lie in (0,1)");
    if (!(L > 0.0)) throw std::invalid_argument("stability_bound: L must be positive");
    return std::pow(1.0 / (L * std::tgamma(2.0 - alpha)), 1.0 / alpha);
}

StabilityVerdict check_stability(const GradedGrid& grid, double alpha, double L) {
    const double bound = stability_bound(alpha, L);
    const double tau_last = grid.taus.back();  // tau_j increases in j for sigma >= 1
    if (tau_last >= bound) return StabilityVerdict::reject;
    if (tau_last >= 0.5 * bound) return StabilityVerdict::warn;
    return StabilityVerdict::ok;
}

EtaPair eta_predictors(double alpha, double sigma, int J) {
    if (J < 2) throw std::invalid_argument("eta_predictors: J must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("eta_predictors: alpha must lie in (0,1)");
    constexpr double kBranchEps = 1e-12;
    const double lnJ = std::log(double(J));
    EtaPair out;
    if (sigma >= 1.0) {
        const double p = sigma + alpha - 2.0;  // eta1 branch exponent
        if (std::abs(p) <= kBranchEps) {
            out.eta1 = std::pow(double(J), -(1.0 - alpha / 2.0)) * std::sqrt(lnJ);
        } else if (sigma < 2.0 - alpha) {
            out.eta1 = std::pow(double(J), -sigma / 2.0) * std::sqrt((1.0 - std::pow(double(J), p)) / -p);
        } else if (sigma < 3.0 - alpha) {
            out.eta1 = std::pow(double(J), -sigma / 2.0) * std::sqrt((std::pow(double(J), p) - 1.0) / p);
        }
        const double q = sigma - 2.0;  // eta2 branch exponent
        if (std::abs(q) <= kBranchEps) {
            out.eta2 = std::sqrt(lnJ) / J;
        } else if (sigma < 2.0) {
            out.eta2 = std::pow(double(J), -sigma / 2.0) * std::sqrt((1.0 - std::pow(double(J), q)) / -q);
        } else if (sigma < 3.0) {
            out.eta2 = std::pow(double(J), -sigma / 2.0) * std::sqrt((std::pow(double(J), q) - 1.0) / q);
        }
    }
    return out;
}

double frac_integral_piecewise(const GradedGrid& grid, double alpha,
                               const std::vector<double>& values, double t) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("frac_integral_piecewise: alpha must lie in (0,1)");
    if (values.size() != static_cast<std::size_t>(grid.J))
        throw std::invalid_argument("frac_integral_piecewise: one value per interval required");
    if (!(t > 0.0) || t > grid.T)
        throw std::invalid_argument("frac_integral_piecewise: t must lie in (0, T]");
    const double e = 1.0 - alpha;
    // Interval m holds t: smallest m with t <= t_m.
    const auto it = std::lower_bound(grid.times.begin() + 1, grid.times.end(), t);
    const int m = int(it - grid.times.begin());
    double acc = 0.0;
    for (int k = 1; k < m; ++k)
        acc += values[k - 1] *
               (std::pow(t - grid.times[k - 1], e) - std::pow(t - grid.times[k], e));
    acc += values[m - 1] * std::pow(t - grid.times[m - 1], e);
    return acc / std::tgamma(2.0 - alpha);
}

}  // namespace fdk
