#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fdk/mittag_leffler.hpp"

using namespace fdk;

TEST_CASE("classical identities") {
    for (double x : {-0.25, -1.0, -5.0, -20.0})
        CHECK(mittag_leffler(1.0, 1.0, x) == doctest::Approx(std::exp(x)).epsilon(1e-12));

    CHECK(mittag_leffler(0.5, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mittag_leffler(0.3, 0.7, 0.0) ==
          doctest::Approx(1.0 / std::tgamma(0.7)).epsilon(1e-14));

    // E_{1/2,1}(-t) = exp(t^2) erfc(t)
    for (double t : {0.3, 1.0, 3.0, 6.0})
        CHECK(mittag_leffler(0.5, 1.0, -t) ==
              doctest::Approx(std::exp(t * t) * std::erfc(t)).epsilon(1e-11));
}

TEST_CASE("frozen extended-precision reference values") {
    struct Ref {
        double alpha, beta, x, value;
    };
    const Ref refs[] = {
        {1.0, 1.0, -1.0, 0.36787944117144233},
        {0.5, 1.0, -1.0, 0.42758357615580700},   // = e*erfc(1)
        {0.5, 1.0, -3.0, 0.17900115118138995},
        {0.3, 1.0, -2.0, 0.29023222616787536},
        {0.7, 0.65, -5.0, 1.8413338040319547e-3},
        {0.5, 0.75, -1.0, 0.29387015996363620},
        {0.9, 1.0, -10.0, 1.2820606051102100e-2},
        {0.1, 1.0, -0.5, 0.65432446028800193},
        {0.5, 1.0, -100.0, 5.6416137829894329e-3},  // asymptotic branch
        {0.3, 1.0, -1000.0, 7.6993246495257769e-4},
    };
    for (const Ref& r : refs)
        CHECK(mittag_leffler(r.alpha, r.beta, r.x) == doctest::Approx(r.value).epsilon(1e-12));
    // value pinned exactly at the branch switch
    CHECK(mittag_leffler(0.2, 1.0, -ml_switch_radius(0.2)) ==
          doctest::Approx(0.30062403291791021).epsilon(1e-12));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(mittag_leffler(-0.5, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(mittag_leffler(0.5, 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(mittag_leffler(0.5, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("complete monotonicity envelope: positive and nonincreasing") {
    for (double a : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
        for (double b : {1.0, a}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 100; ++i) {
                const double t = std::pow(10.0, -4.0 + 0.1 * i);  // 1e-4 .. 1e6
                if (a == 1.0 && t > 700.0) break;  // exp(-t) underflows to 0
                const double v = mittag_leffler(a, b, -t);
                CHECK(v > 0.0);
                CHECK(v <= prev * (1.0 + 1e-12));
                prev = v;
            }
        }
    }
}

TEST_CASE("growth bound scaling: (1+t) E_{a,1}(-t) stays bounded") {
    for (double a : {0.3, 0.5, 0.7}) {
        double sup = 0.0;
        for (int i = 0; i <= 60; ++i) {
            const double t = std::pow(10.0, -2.0 + 0.1 * i);
            sup = std::max(sup, (1.0 + t) * mittag_leffler(a, 1.0, -t));
        }
        CHECK(sup < 2.0);
    }
}

TEST_CASE("series/asymptotic overlap at the switch radius") {
    for (int i = 1; i <= 9; ++i) {
        const double a = 0.1 * i;
        const double x = -ml_switch_radius(a);
        for (double b : {1.0, 1.0 - a / 2.0}) {
            const double s = detail::ml_series(a, b, x);
            const double as = detail::ml_asymptotic(a, b, x);
            CHECK(std::fabs(s - as) <= 1e-9 * std::fabs(s));
        }
    }
    CHECK(ml_switch_radius(0.5) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("reciprocal gamma helper") {
    CHECK(detail::reciprocal_gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(detail::reciprocal_gamma(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(detail::reciprocal_gamma(3.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(detail::reciprocal_gamma(0.5) ==
          doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    // poles of Gamma at nonpositive integers
    CHECK(detail::reciprocal_gamma(0.0) == 0.0);
    CHECK(detail::reciprocal_gamma(-1.0) == 0.0);
    CHECK(detail::reciprocal_gamma(-7.0) == 0.0);
    // reflection-formula territory
    for (double z : {-0.5, -1.5, -5.5, -20.25})
        CHECK(detail::reciprocal_gamma(z) ==
              doctest::Approx(1.0 / std::tgamma(z)).epsilon(1e-12));
    // arguments past the double-overflow point of Gamma
    CHECK(detail::reciprocal_gamma(180.0) == 0.0);
    CHECK(detail::reciprocal_gamma(1700.0) == 0.0);
}
