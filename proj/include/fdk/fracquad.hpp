// Graded temporal grids and the exact Riemann-Liouville convolution weights
// of the piecewise-constant DG time discretization, plus the step-size
// stability bound and the closed-form rate predictors eta1/eta2.
#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace fdk {

struct GradedGrid {
    int J = 0;           // number of intervals, >= 2
    double sigma = 1.0;  // grading exponent, >= 1
    double T = 1.0;
    std::vector<double> times;  // t_j = (j/J)^sigma * T, j = 0..J (t_J = T exactly)
    std::vector<double> taus;   // tau_j = t_j - t_{j-1}, j = 1..J at index j-1

    double tau(int j) const { return taus[j - 1]; }  // 1-based like t_j
};

// Throws std::invalid_argument for J < 2, sigma < 1, or T <= 0.
GradedGrid graded_grid(int J, double sigma, double T);

// Wraps an arbitrary strictly increasing breakpoint sequence (t_0 = 0) as a
// grid so convolution weights can be computed on merged timelines; sigma is
// reported as NaN since no grading law applies.
GradedGrid grid_from_breakpoints(std::vector<double> times);

// Row j of the convolution weights: b_{j,k} for k = 1..j, where
//   b_{j,k} = [ (t_j - t_{k-1})^{1-a} - (t_j - t_k)^{1-a}
//             - (t_{j-1} - t_{k-1})^{1-a} + (t_{j-1} - t_k)^{1-a} ] / Gamma(2-a)
// (terms with a nonpositive time difference vanish). The row satisfies the
// telescoping identity sum_k b_{j,k} = (t_j^{1-a} - t_{j-1}^{1-a})/Gamma(2-a).
// Throws std::invalid_argument for alpha outside (0,1) or j outside 1..J.
std::vector<double> conv_weights_row(const GradedGrid& grid, double alpha, int j);

// Lazily cached weight rows for one (grid, alpha). Rows are cached only for
// J <= 4096 (O(J^2)/2 doubles); beyond that row(j) recomputes on demand.
// Thread-safe for concurrent readers.
class ConvWeights {
  public:
    ConvWeights(GradedGrid grid, double alpha);

    const GradedGrid& grid() const { return grid_; }
    double alpha() const { return alpha_; }

    // The j-th row (size j). Returns a reference into the cache when caching
    // is active, otherwise fills `scratch` and returns a reference to it.
    const std::vector<double>& row(int j, std::vector<double>& scratch) const;

  private:
    GradedGrid grid_;
    double alpha_;
    bool caching_;
    mutable std::mutex mu_;
    mutable std::vector<std::unique_ptr<const std::vector<double>>> rows_;
};

// (1/(L*Gamma(2-alpha)))^(1/alpha), the largest admissible final step: the
// marching problem has a unique solution when tau_J stays strictly below it.
// Throws std::invalid_argument for alpha outside (0,1) or L <= 0.
double stability_bound(double alpha, double L);

// Verdict of the step-size gate used by the solver: reject at the bound,
// warn above half of it (the analysis' standing assumption halves the bound
// by an additional non-constructive constant).
enum class StabilityVerdict { ok, warn, reject };
StabilityVerdict check_stability(const GradedGrid& grid, double alpha, double L);

// Rate predictors. Each is defined only on its branch range
// (1 <= sigma < 3-alpha for eta1, 1 <= sigma < 3 for eta2); outside the range
// the predictor is reported as absent rather than an error.
struct EtaPair {
    std::optional<double> eta1;
    std::optional<double> eta2;
};
EtaPair eta_predictors(double alpha, double sigma, int J);

// Riemann-Liouville fractional integral of order 1-alpha of the piecewise
// constant with per-interval values `values` (size J), evaluated at t in
// (0, T]; closed form via the same antiderivatives as the weights.
double frac_integral_piecewise(const GradedGrid& grid, double alpha,
                               const std::vector<double>& values, double t);

}  // namespace fdk
