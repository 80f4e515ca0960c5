#include "fdk/mittag_leffler.hpp"

#include <quadmath.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fdk {

double ml_switch_radius(double alpha) { return std::pow(36.0, alpha); }

namespace detail {

double reciprocal_gamma(double z) {
    if (z >= 0.5) {
        const double lg = std::lgamma(z);
        if (lg > 700.0) return 0.0;  // 1/Gamma underflows
        return std::exp(-lg);
    }
    // Reflection: 1/Gamma(z) = Gamma(1-z) * sin(pi z) / pi, with the sine
    // argument reduced so accuracy does not degrade for large negative z.
    const double n = std::floor(z);
    const double frac = z - n;  // in [0,1)
    double s = std::sin(std::numbers::pi * std::min(frac, 1.0 - frac));
    if (std::fmod(n, 2.0) != 0.0) s = -s;
    if (s == 0.0) return 0.0;  // nonpositive integer: Gamma pole
    const double w = 1.0 - z;  // >= 0.5
    if (w < 170.0) return std::tgamma(w) * s / std::numbers::pi;
    const double lmag = std::lgamma(w) + std::log(std::abs(s) / std::numbers::pi);
    if (lmag > 709.0) return std::copysign(std::numeric_limits<double>::infinity(), s);
    return std::copysign(std::exp(lmag), s);
}

namespace {

double ml_series_double(double a, double b, double x) {
    // |x| <= 1: terms decay fast; compensated summation mops up the rest.
    double sum = 0.0, comp = 0.0, p = 1.0;
    for (int i = 0; i < 4000; ++i) {
        const double arg = a * i + b;
        if (arg > 171.0) break;  // 1/Gamma underflows; tail is zero
        const double t = p * reciprocal_gamma(arg);
        const double y = t - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if (i > 3 && std::abs(t) < 1e-17 * std::abs(sum)) break;
        p *= x;
    }
    return sum;
}

// Cached reciprocal-Gamma tables for the quad-precision series: one table per
// (alpha, beta), entries 1/Gamma(i*alpha + beta) with the argument formed in
// __float128. Gamma overflows __float128 near 1755, hence the 1700 cap.
using TablePtr = std::shared_ptr<const std::vector<__float128>>;

TablePtr quad_recip_gamma_table(double a, double b) {
    static std::mutex mu;
    static std::map<std::pair<double, double>, TablePtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{a, b}];
    if (!slot) {
        const __float128 aq = a, bq = b;
        auto table = std::make_shared<std::vector<__float128>>();
        table->reserve(256);
        for (std::int64_t i = 0;; ++i) {
            const __float128 arg = aq * (__float128)i + bq;
            if (arg > (__float128)1700.0 || i > 200000) break;
            table->push_back((__float128)1.0 / tgammaq(arg));
        }
        slot = std::move(table);
    }
    return slot;
}

double ml_series_quad(double a, double b, double x) {
    const TablePtr table = quad_recip_gamma_table(a, b);
    const __float128 xq = x;
    __float128 sum = 0.0, p = 1.0;
    const std::size_t n = table->size();
    for (std::size_t i = 0; i < n; ++i) {
        const __float128 t = p * (*table)[i];
        sum += t;
        if (i > 3 && fabsq(t) < (__float128)1e-38 * fabsq(sum)) break;
        p *= xq;
    }
    return static_cast<double>(sum);
}

}  // namespace

double ml_series(double a, double b, double x) {
    return -x <= 1.0 ? ml_series_double(a, b, x) : ml_series_quad(a, b, x);
}

double ml_asymptotic(double a, double b, double x) {
    // -sum_{k>=1} x^{-k} / Gamma(b - k a). The terms carry a sin(pi(b-ka))
    // factor through the reflected 1/Gamma, so individual magnitudes dip near
    // Gamma poles (to exactly zero on them) and say nothing reliable about
    // convergence or divergence. Both decisions therefore use the sin-free
    // envelope |x|^{-k} Gamma(1+ka-b)/pi >= |term|, which decays smoothly to
    // the optimal-truncation point and then grows without ambiguity.
    const double lpi = std::log(std::numbers::pi);
    const double lxi = -std::log(-x);  // log|x^{-1}|
    const double xr = 1.0 / x;
    double sum = 0.0, comp = 0.0, pw = 1.0;
    double best_sum = 0.0, best_lenv = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 1; k <= 4096; ++k) {
        pw *= xr;
        if (pw == 0.0) break;  // underflow: remaining terms are exactly zero
        const double z = b - k * a;
        const double t = -pw * reciprocal_gamma(z);
        if (std::isnan(t) || std::isinf(t)) break;
        if (t != 0.0) {  // Gamma poles zero out terms; just skip them
            const double y = t - comp;
            const double s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        const double lenv =
            k * lxi + (z >= 0.5 ? std::log(reciprocal_gamma(z)) : std::lgamma(1.0 - z) - lpi);
        if (lenv < -700.0 || (sum != 0.0 && lenv <= std::log(1e-13 * std::abs(sum))))
            return sum;  // envelope bounds the tail in its decreasing phase
        if (lenv < best_lenv) {
            best_lenv = lenv;
            best_sum = sum;
            best_k = k;
        } else if (lenv > best_lenv + 7.0 && k > best_k + 4) {
            break;  // envelope confirmed divergent past its minimum
        }
    }
    return best_sum;
}

}  // namespace detail

double mittag_leffler(double alpha, double beta, double x) {
    if (!(alpha > 0.0)) throw std::invalid_argument("mittag_leffler: alpha must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("mittag_leffler: beta must be positive");
    if (!(x <= 0.0)) throw std::invalid_argument("mittag_leffler: only x <= 0 is implemented");
    if (x == 0.0) return detail::reciprocal_gamma(beta);
    if (alpha == 1.0 && beta == 1.0) return std::exp(x);
    return -x <= ml_switch_radius(alpha) ? detail::ml_series(alpha, beta, x)
                                         : detail::ml_asymptotic(alpha, beta, x);
}

}  // namespace fdk
