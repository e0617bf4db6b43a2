#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bhchaos/chaos.hpp"
#include "bhchaos/compare.hpp"
#include "bhchaos/util.hpp"

using namespace bhc;

namespace {

std::vector<double> gaussian_samples(std::uint64_t seed, int n, double mu, double sigma) {
    Rng rng(seed);
    std::vector<double> xs(n);
    for (double& x : xs) x = mu + sigma * rng.gaussian();
    return xs;
}

// analytic histogram of a Gaussian on a fine uniform grid
HistogramDensity analytic_gaussian_hist(double mu, double sigma, int bins, double span) {
    HistogramDensity h;
    h.n_samples = 1;
    h.edges.resize(bins + 1);
    double lo = mu - span * sigma, hi = mu + span * sigma;
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    h.density.resize(bins);
    double w = (hi - lo) / bins, total = 0.0;
    for (int i = 0; i < bins; ++i) {
        h.density[i] = gaussian_pdf(0.5 * (h.edges[i] + h.edges[i + 1]), mu, sigma);
        total += h.density[i] * w;
    }
    for (double& d : h.density) d /= total;
    return h;
}

}  // namespace

TEST_CASE("histogram density normalizes and respects the bin floor") {
    auto xs = gaussian_samples(5, 4000, 0.3, 0.05);
    auto h = histogram_density(xs);
    CHECK(h.bins() >= 20);
    KahanSum s;
    for (int i = 0; i < h.bins(); ++i) s.add(h.density[i] * (h.edges[i + 1] - h.edges[i]));
    CHECK(std::abs(s.value() - 1.0) < 1e-12);
    // tiny samples fall back to the floor bin count
    std::vector<double> few{0.1, 0.2, 0.3};
    CHECK(histogram_density(few).bins() == 20);
    std::vector<double> constant(10, 1.0);
    auto hc = histogram_density(constant);
    KahanSum sc;
    for (int i = 0; i < hc.bins(); ++i) sc.add(hc.density[i] * (hc.edges[i + 1] - hc.edges[i]));
    CHECK(std::abs(sc.value() - 1.0) < 1e-12);
}

TEST_CASE("edgeworth fit of normal samples is nearly Gaussian") {
    const int n = 100000;
    auto xs = gaussian_samples(17, n, 0.0, 1.0);
    auto m = edgeworth_fit(xs);
    CHECK(std::abs(m.gamma1) < 3.0 * std::sqrt(6.0 / n));
    CHECK(std::abs(m.gamma2) < 3.0 * std::sqrt(24.0 / n));
    // density integrates to one after clipping
    const int ng = 20000;
    double a = m.mu - 12 * m.sigma, b = m.mu + 12 * m.sigma, h = (b - a) / ng;
    KahanSum s;
    for (int i = 0; i <= ng; ++i) s.add(((i == 0 || i == ng) ? 0.5 : 1.0) * m(a + i * h));
    CHECK(std::abs(s.value() * h - 1.0) < 1e-3);
    // and stays close to the plain Gaussian
    for (double x : {-2.0, -1.0, 0.0, 0.5, 1.5})
        CHECK(std::abs(m(x) - gaussian_pdf(x, m.mu, m.sigma)) < 0.01);

    std::vector<double> few(10, 0.0);
    CHECK_THROWS_AS(edgeworth_fit(few), DomainError);
}

TEST_CASE("edgeworth fit captures skewed samples") {
    Rng rng(23);
    std::vector<double> xs(200000);
    for (double& x : xs) x = -std::log(rng.uniform());  // exponential: gamma1 = 2
    auto m = edgeworth_fit(xs);
    CHECK(m.gamma1 == doctest::Approx(2.0).epsilon(0.05));
    const int ng = 40000;
    double a = m.mu - 14 * m.sigma, b = m.mu + 14 * m.sigma, h = (b - a) / ng;
    KahanSum s;
    for (int i = 0; i <= ng; ++i) s.add(((i == 0 || i == ng) ? 0.5 : 1.0) * m(a + i * h));
    CHECK(std::abs(s.value() * h - 1.0) < 1e-3);
}

TEST_CASE("d_q distance") {
    CHECK(d_q_distance(0.8, 0.8, 0.01) == 0.0);
    CHECK(d_q_distance(0.9, 0.8, 0.01) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d_q_distance(0.8, 0.9, 0.01) == doctest::Approx(-1.0).epsilon(1e-14));
    // antisymmetry under swapping the means at fixed variance
    CHECK(d_q_distance(0.7, 0.9, 0.02) == doctest::Approx(-d_q_distance(0.9, 0.7, 0.02)));
    CHECK_THROWS_AS(d_q_distance(0.9, 0.8, 0.0), DomainError);
}

TEST_CASE("KL divergence") {
    auto xs = gaussian_samples(31, 20000, 0.5, 0.1);
    auto p = histogram_density(xs);
    // identical distributions on the shared grid
    CHECK(kl_divergence(p, [&](double x) { return p.value_at(x); }) == 0.0);
    // Gaussians one sigma apart: KL = 1/2
    auto fine = analytic_gaussian_hist(0.0, 1.0, 2400, 8.0);
    double kl = kl_divergence(fine, [](double x) { return gaussian_pdf(x, 1.0, 1.0); });
    CHECK(kl == doctest::Approx(0.5).epsilon(0.02));
    // non-negativity on sampled pairs
    for (std::uint64_t s = 0; s < 8; ++s) {
        auto a = histogram_density(gaussian_samples(100 + s, 5000, 0.4, 0.12));
        auto b = histogram_density(gaussian_samples(200 + s, 5000, 0.45, 0.1));
        CHECK(kl_divergence(a, [&](double x) { return b.value_at(x); }) >= -1e-9);
    }
}

TEST_CASE("integrated squared error prefers the better model") {
    Rng rng(41);
    std::vector<double> xs(100000);
    for (double& x : xs) {
        double u = rng.gaussian();
        x = u + 0.15 * (u * u - 1.0);  // mildly skewed
    }
    auto h = histogram_density(xs);
    auto em = edgeworth_fit(xs);
    auto ms = moment_stats(xs);
    double ise_e = integrated_squared_error(h, [&](double x) { return em(x); });
    double ise_g = integrated_squared_error(
        h, [&](double x) { return gaussian_pdf(x, ms.mean, std::sqrt(ms.var)); });
    CHECK(ise_e < ise_g);
}

TEST_CASE("bulk-centre energy map") {
    std::map<double, double> curve{{0.2, 0.45}, {0.3, 0.5}};
    CHECK(eps_egoe_map(0.4, 0.2, curve) == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(eps_egoe_map(0.45, 0.2, curve) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eps_egoe_map(0.6, 0.3, curve) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(eps_egoe_map(0.05, 0.3, curve) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(eps_egoe_map(0.98, 0.2, curve) == 1.0);       // clamped
    CHECK(eps_egoe_map(0.6, 0.3, curve, true) == doctest::Approx(0.4));  // folded
    CHECK_THROWS_AS(eps_egoe_map(0.4, 0.25, curve), DomainError);
}

TEST_CASE("percentile energy map") {
    std::vector<double> eps;
    for (int i = 0; i <= 200; ++i) eps.push_back(i / 200.0);
    for (double x : {0.0, 0.123, 0.5, 0.87, 1.0})
        CHECK(eps_egoe_percentile(x, eps, eps) == doctest::Approx(x).epsilon(1e-12));
    // a uniformly right-shifted spectrum maps fractions to shifted values
    std::vector<double> shifted;
    for (double x : eps) shifted.push_back(x * 0.5);
    CHECK(eps_egoe_percentile(0.4, eps, shifted) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(eps_egoe_percentile(0.0, eps, shifted) == 0.0);
    CHECK(eps_egoe_percentile(1.0, eps, shifted) == doctest::Approx(0.5));
}
