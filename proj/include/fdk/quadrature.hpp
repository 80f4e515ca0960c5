// Adaptive Gauss-Kronrod 7/15 quadrature with absolute-error target.
#pragma once

#include <functional>
#include <stdexcept>

namespace fdk {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrates f over [a, b] to absolute accuracy ~abs_tol by recursive
// bisection of the 7/15 Gauss-Kronrod pair. Throws QuadratureError if the
// error estimate still exceeds the budget at the maximum recursion depth.
double adaptive_gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                              double abs_tol);

}  // namespace fdk
