// Mittag-Leffler function E_{alpha,beta}(x) on the negative real axis.
#pragma once

namespace fdk {

// E_{alpha,beta}(x) = sum_{i>=0} x^i / Gamma(i*alpha + beta) for x <= 0.
// Throws std::invalid_argument for alpha <= 0, beta <= 0, or x > 0.
//
// Evaluation strategy (switch radius 36^alpha, chosen so the power series'
// worst intermediate term is ~e^36 for every alpha, which extended-precision
// summation absorbs, while beyond it the optimally truncated asymptotic
// series already attains ~e^-36 accuracy):
//   |x| <= 1          plain double series with compensated summation
//   1 < |x| <= 36^a   series summed in __float128, Gamma arguments formed in
//                     __float128 (double rounding of i*alpha+beta is amplified
//                     by psi(arg) * max-term and would destroy the sum)
//   |x| > 36^a        asymptotic series -sum_k x^{-k}/Gamma(beta - k*alpha),
//                     truncated at the globally smallest term
double mittag_leffler(double alpha, double beta, double x);

// The series/asymptotic switch radius 36^alpha.
double ml_switch_radius(double alpha);

namespace detail {
// Both halves exposed for the overlap consistency tests: each is valid in a
// neighborhood of the switch radius.
double ml_series(double alpha, double beta, double x);      // |x| <= 36^alpha
double ml_asymptotic(double alpha, double beta, double x);  // |x| >~ 1
// 1/Gamma(z) for arbitrary real z (reflection formula on the left half line).
double reciprocal_gamma(double z);
}  // namespace detail

}  // namespace fdk
