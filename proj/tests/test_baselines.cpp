#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bhchaos/baselines.hpp"
#include "bhchaos/chaos.hpp"
#include "bhchaos/egoe.hpp"
#include "bhchaos/spectra.hpp"

using namespace bhc;

namespace {

// long-double compensated oracle for the partial harmonic sums
long double harmonic_oracle(std::int64_t n) {
    long double s = 0.0L, c = 0.0L;
    for (std::int64_t k = n; k >= 1; --k) {
        long double y = 1.0L / k - c;
        long double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace

TEST_CASE("harmonic numbers") {
    CHECK(harmonic_number(1) == 1.0);
    CHECK(harmonic_number(3) == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
    CHECK(harmonic_number(63) ==
          doctest::Approx(static_cast<double>(harmonic_oracle(63))).epsilon(1e-12));
    CHECK(harmonic_number(2'000'000) ==
          doctest::Approx(static_cast<double>(harmonic_oracle(2'000'000))).epsilon(1e-12));
    CHECK(harmonic_number_real(63.0) == doctest::Approx(harmonic_number(63)).epsilon(1e-11));
    CHECK_THROWS_AS(harmonic_number(0), DomainError);
}

TEST_CASE("trigamma") {
    const double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
    CHECK(trigamma(1.0) == doctest::Approx(pi2_6).epsilon(1e-12));
    CHECK(trigamma(2.0) == doctest::Approx(pi2_6 - 1.0).epsilon(1e-12));
    // recurrence property
    for (double x : {0.3, 1.7, 5.5, 20.25})
        CHECK(trigamma(x) == doctest::Approx(trigamma(x + 1.0) + 1.0 / (x * x)).epsilon(1e-12));
    // independent oracle: second central difference of lgamma
    auto lg_dd = [](double x) {
        const double h = 1e-2;
        double f1 = (std::lgamma(x + h) - 2 * std::lgamma(x) + std::lgamma(x - h)) / (h * h);
        const double h2 = h / 2;
        double f2 = (std::lgamma(x + h2) - 2 * std::lgamma(x) + std::lgamma(x - h2)) / (h2 * h2);
        return (4 * f2 - f1) / 3.0;  // Richardson
    };
    CHECK(trigamma(34.5) == doctest::Approx(lg_dd(34.5)).epsilon(1e-8));
    CHECK_THROWS_AS(trigamma(0.0), DomainError);
    CHECK_THROWS_AS(trigamma(-2.0), DomainError);
}

TEST_CASE("GOE D1 statistics") {
    auto mv = goe_d1_stats(126);
    CHECK(mv.mean == doctest::Approx(0.8508).epsilon(2e-4));
    // high-precision re-evaluation of the same expression
    double expect = (harmonic_number(63) - 2.0 + std::log(4.0)) / std::log(126.0);
    CHECK(mv.mean == doctest::Approx(expect).epsilon(1e-14));
    CHECK(mv.var > 0.0);

    // asymptotics: (1 - mean) ln N -> 2 - gamma - ln 2
    double lim = 2.0 - kEulerGamma - std::log(2.0);
    double v20 = (1.0 - goe_d1_stats(1 << 20).mean) * std::log(static_cast<double>(1 << 20));
    CHECK(v20 == doctest::Approx(lim).epsilon(3e-3));
    double v14 = (1.0 - goe_d1_stats(1 << 14).mean) * std::log(static_cast<double>(1 << 14));
    CHECK(std::abs(v14 - lim) > std::abs(v20 - lim));  // monotone approach

    // odd dimensions go through the digamma continuation
    double odd = goe_d1_stats(127).mean;
    CHECK(odd > goe_d1_stats(126).mean);
    CHECK(odd < goe_d1_stats(128).mean);
}

TEST_CASE("GOE D2 statistics") {
    auto mv = goe_d2_stats(126);
    CHECK(mv.mean == doctest::Approx((std::log(128.0) - std::log(3.0)) / std::log(126.0))
                         .epsilon(1e-15));
    CHECK(mv.mean == doctest::Approx(0.7761).epsilon(2e-4));
    CHECK_THROWS_AS(goe_d2_stats(1), DomainError);
}

TEST_CASE("variance asymptotics stay bounded") {
    // var * N ln^2 N approaches (3 pi^2 - 24)/2 - 2 for D1 and 8/3 for D2
    for (int p = 8; p <= 14; ++p) {
        std::int64_t n = 1ll << p;
        double logn = std::log(static_cast<double>(n));
        double v1 = goe_d1_stats(n).var * n * logn * logn;
        double v2 = goe_d2_stats(n).var * n * logn * logn;
        CHECK(v1 > 0.7);
        CHECK(v1 < 0.9);
        CHECK(v2 > 2.4);
        CHECK(v2 < 2.8);
    }
}

TEST_CASE("quadrature engine") {
    CHECK(integrate_gk([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate_gk([](double x) { return std::exp(x); }, -1.0, 2.0) ==
          doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-12));
    // integrable log singularity
    CHECK(integrate_gk([](double x) { return std::log(x); }, 1e-12, 1.0, 1e-9, 1e-12) ==
          doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("Dinf moments against a small-dimension Monte Carlo") {
    // The moment integral is asymptotic in the dimension. Measured against
    // GOE sampling the discrepancy of the mean is about -0.046 at dim 10 and
    // -0.004 at dim 64, shrinking roughly an order of magnitude per 8x in
    // dim; only the band and the shrinkage are asserted here.
    auto mc_mean = [](std::int64_t d, int reals, std::uint64_t seed0) {
        double acc = 0;
        for (int r = 0; r < reals; ++r) {
            auto g = sample_goe(d, seed0 + r);
            auto s = diagonalize_dense(std::move(g.matrix), d, true);
            for (std::int64_t k = 0; k < d; ++k) acc += gfd(s.vector(k), kQInf, d);
        }
        return acc / (reals * d);
    };
    double bias10 = mc_mean(10, 800, 1000) - goe_dinf_moment(10, 1);
    double bias64 = mc_mean(64, 200, 2000) - goe_dinf_moment(64, 1);
    CHECK(std::abs(bias10) < 0.06);
    CHECK(std::abs(bias64) < 0.012);
    CHECK(std::abs(bias64) < std::abs(bias10));
}

TEST_CASE("Dinf moment asymptotics") {
    // (1 - m1) ln N / ln ln N approaches a constant
    std::vector<double> ratio;
    for (int p = 8; p <= 14; p += 2) {
        std::int64_t n = 1ll << p;
        double logn = std::log(static_cast<double>(n));
        ratio.push_back((1.0 - goe_dinf_moment(n, 1)) * logn / std::log(logn));
    }
    for (std::size_t i = 0; i + 1 < ratio.size(); ++i)
        CHECK(std::abs(ratio[i + 1] - ratio[i]) < 0.12 * ratio[i]);

    // var Dinf ~ ln^-4 N: slope of ln var against ln ln N
    std::vector<double> x, y;
    for (int p = 8; p <= 14; ++p) {
        std::int64_t n = 1ll << p;
        double m1 = goe_dinf_moment(n, 1), m2 = goe_dinf_moment(n, 2);
        x.push_back(std::log(std::log(static_cast<double>(n))));
        y.push_back(std::log(m2 - m1 * m1));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    double slope = sxy / sxx;
    CHECK(slope == doctest::Approx(-4.0).epsilon(0.075));
}

TEST_CASE("Dinf density normalizes and peaks near the mean") {
    for (std::int64_t dim : {126ll, 1024ll}) {
        const int ng = 3000;
        const double a = 1e-4, b = 1.5;
        double h = (b - a) / ng;
        KahanSum s;
        for (int i = 0; i <= ng; ++i) {
            double w = (i == 0 || i == ng) ? 0.5 : 1.0;
            s.add(w * goe_dinf_pdf(a + i * h, dim));
        }
        CHECK(std::abs(s.value() * h - 1.0) < 1e-3);
    }
    // mode location versus the first moment
    const std::int64_t dim = 1024;
    double best_x = 0, best = -1;
    for (int i = 1; i < 3000; ++i) {
        double x = 1.5 * i / 3000.0;
        double p = goe_dinf_pdf(x, dim);
        if (p > best) {
            best = p;
            best_x = x;
        }
    }
    CHECK(std::abs(best_x - goe_dinf_moment(dim, 1)) < 0.05 * best_x);
}

TEST_CASE("baseline table assembly") {
    auto b = goe_baseline(126);
    CHECK(b.mean_d1 == doctest::Approx(goe_d1_stats(126).mean));
    CHECK(b.dinf_moments.at(1) > 0.5);
    CHECK(b.dinf_moments.at(1) < 1.0);
    CHECK(b.var_d1 > 0.0);
    CHECK(b.var_d2 > 0.0);
}
