#include "bhchaos/baselines.hpp"

#include <cmath>
#include <numbers>

namespace bhc {

double harmonic_number(std::int64_t n) {
    if (n < 1) throw DomainError("harmonic_number: n >= 1");
    if (n <= 1'000'000) {
        KahanSum s;
        for (std::int64_t k = n; k >= 1; --k) s.add(1.0 / k);
        return s.value();
    }
    double x = static_cast<double>(n);
    double x2 = x * x;
    return std::log(x) + kEulerGamma + 1.0 / (2 * x) - 1.0 / (12 * x2) + 1.0 / (120 * x2 * x2);
}

double digamma(double x) {
    if (x <= 0.0) throw DomainError("digamma: x > 0");
    double acc = 0.0;
    while (x < 16.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    // asymptotic series with Bernoulli coefficients
    double series = std::log(x) - 0.5 * inv -
                    inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 / 240)));
    return acc + series;
}

double trigamma(double x) {
    if (x <= 0.0) throw DomainError("trigamma: x > 0");
    double acc = 0.0;
    while (x < 16.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    double series =
        inv * (1.0 + 0.5 * inv +
               inv2 * (1.0 / 6 -
                       inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * 5.0 / 66)))));
    return acc + series;
}

double harmonic_number_real(double x) {
    if (x <= 0.0) throw DomainError("harmonic_number_real: x > 0");
    return digamma(x + 1.0) + kEulerGamma;
}

MeanVar goe_d1_stats(std::int64_t dim) {
    if (dim < 2) throw DomainError("goe_d1_stats: dim >= 2");
    const double N = static_cast<double>(dim);
    const double logN = std::log(N);
    double h = (dim % 2 == 0) ? harmonic_number(dim / 2) : harmonic_number_real(N / 2.0);
    MeanVar mv;
    mv.mean = (h - 2.0 + std::log(4.0)) / logN;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    mv.var = ((3.0 * pi2 - 24.0) * (N + 2.0) - 8.0) / (2.0 * (N + 2.0) * (N + 2.0) * logN * logN) -
             trigamma(2.0 + N / 2.0) / (logN * logN);
    return mv;
}

MeanVar goe_d2_stats(std::int64_t dim) {
    if (dim < 2) throw DomainError("goe_d2_stats: dim >= 2 (ln 1 = 0 degenerates the formula)");
    const double N = static_cast<double>(dim);
    const double logN = std::log(N);
    MeanVar mv;
    mv.mean = (std::log(N + 2.0) - std::log(3.0)) / logN;
    mv.var = 8.0 * (N - 1.0) / (3.0 * (N + 4.0) * (N + 6.0) * logN * logN);
    return mv;
}

namespace {

// log(erf(x)) without underflow for large x
double log_erf(double x) {
    double e = std::erf(x);
    if (e > 0.5) return std::log1p(-std::erfc(x));
    if (e <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(e);
}

struct Gk15 {
    // QUADPACK dqk15 nodes and weights
    static constexpr double xgk[8] = {0.991455371120812639206854697526329,
                                      0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926,
                                      0.741531185599394439863864773280788,
                                      0.586087235467691130294144838258730,
                                      0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970,
                                      0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518,
                                      0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550,
                                      0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649,
                                      0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082,
                                     0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975,
                                     0.417959183673469387755102040816327};
};

void gk15(const std::function<double(double)>& f, double a, double b, double& result,
          double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double res_g = fc * Gk15::wg[3];
    double res_k = fc * Gk15::wgk[7];
    for (int i = 0; i < 7; ++i) {
        double x = h * Gk15::xgk[i];
        double f1 = f(c - x), f2 = f(c + x);
        res_k += Gk15::wgk[i] * (f1 + f2);
        if (i % 2 == 1) res_g += Gk15::wg[i / 2] * (f1 + f2);
    }
    result = res_k * h;
    err = std::abs((res_k - res_g) * h);
}

void gk_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol, int depth, double& acc) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= abs_tol || e <= rel_tol * std::abs(r)) {
        acc += r;
        return;
    }
    if (depth > 50) throw NumericalError("integrate_gk: adaptive bisection did not converge");
    double c = 0.5 * (a + b);
    gk_adaptive(f, a, c, rel_tol, abs_tol * 0.5, depth + 1, acc);
    gk_adaptive(f, c, b, rel_tol, abs_tol * 0.5, depth + 1, acc);
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
                    double abs_tol) {
    double acc = 0.0;
    gk_adaptive(f, a, b, rel_tol, abs_tol, 0, acc);
    return acc;
}

double goe_dinf_moment(std::int64_t dim, int k) {
    if (dim < 2) throw DomainError("goe_dinf_moment: dim >= 2");
    if (k < 1) throw DomainError("goe_dinf_moment: k >= 1");
    const double N = static_cast<double>(dim);
    const double logN = std::log(N);

    // substitution s = e^u turns the integrable log-singularity at s = 0 into
    // a smooth superexponential cutoff in u
    auto integrand = [&](double u) {
        double s = std::exp(u);
        double le = log_erf(std::sqrt(0.5 * N * s));
        double lg = N * le;
        if (lg < -700.0) return 0.0;
        double w = std::exp(lg);
        double poly = 1.0;
        for (int i = 0; i < k - 1; ++i) poly *= u;
        return poly * w;
    };

    // lower cutoff: below this u the Erf^N factor underflows
    double lo = -2.0, hi = 0.0;
    {
        double u = -2.0;
        while (u > -740.0) {
            double le = log_erf(std::sqrt(0.5 * N * std::exp(u)));
            if (N * le < -720.0) break;
            u -= 2.0;
        }
        lo = u;
    }
    double integral = integrate_gk(integrand, lo, hi, 1e-10, 1e-300);
    double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return k * sign * integral / std::pow(logN, k);
}

MeanVar goe_dinf_stats(std::int64_t dim) {
    MeanVar mv;
    mv.mean = goe_dinf_moment(dim, 1);
    double m2 = goe_dinf_moment(dim, 2);
    mv.var = m2 - mv.mean * mv.mean;
    return mv;
}

double goe_dinf_pdf(double dinf, std::int64_t dim) {
    if (dim < 2) throw DomainError("goe_dinf_pdf: dim >= 2");
    if (!(dinf > 0.0)) throw DomainError("goe_dinf_pdf: dinf > 0");
    const double N = static_cast<double>(dim);
    const double logN = std::log(N);
    const double t = std::exp(-dinf * logN);
    double lp = 1.5 * logN - 0.5 * std::log(2.0 * std::numbers::pi * t) - 0.5 * t * N +
                (N - 1.0) * log_erf(std::sqrt(0.5 * t * N)) + std::log(t) + std::log(logN);
    return lp < -700.0 ? 0.0 : std::exp(lp);
}

GoeBaseline goe_baseline(std::int64_t dim) {
    GoeBaseline b;
    b.dim = dim;
    auto d1 = goe_d1_stats(dim);
    auto d2 = goe_d2_stats(dim);
    b.mean_d1 = d1.mean;
    b.var_d1 = d1.var;
    b.d2_tilde = d2.mean;
    b.var_d2 = d2.var;
    b.dinf_moments[1] = goe_dinf_moment(dim, 1);
    b.dinf_moments[2] = goe_dinf_moment(dim, 2);
    return b;
}

}  // namespace bhc
