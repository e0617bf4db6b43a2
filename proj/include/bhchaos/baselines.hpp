#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "bhchaos/util.hpp"

namespace bhc {

// Partial harmonic sum; exact summation up to 10^6 terms, asymptotic series
// beyond (relative error < 1e-12).
double harmonic_number(std::int64_t n);
double harmonic_number_real(double x);  // h_x = psi(x+1) + gamma for non-integer order

double digamma(double x);
double trigamma(double x);  // throws DomainError for x <= 0

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

// Finite-size GOE expectations of the fractal dimensions: D1 mean/variance,
// the 2-moment dimension -log_N <R_2> and its variance, and the k-th moments
// of Dinf from the max-intensity integral (adaptive quadrature).
MeanVar goe_d1_stats(std::int64_t dim);
MeanVar goe_d2_stats(std::int64_t dim);
double goe_dinf_moment(std::int64_t dim, int k);
MeanVar goe_dinf_stats(std::int64_t dim);  // from the k = 1, 2 moments

// Density of Dinf over GOE eigenvectors, evaluated with t = dim^(-dinf).
double goe_dinf_pdf(double dinf, std::int64_t dim);

struct GoeBaseline {
    std::int64_t dim = 0;
    double mean_d1 = 0.0, var_d1 = 0.0;
    double d2_tilde = 0.0, var_d2 = 0.0;
    std::map<int, double> dinf_moments;  // k -> <Dinf^k>
};

GoeBaseline goe_baseline(std::int64_t dim);

// Adaptive Gauss-Kronrod (G7/K15) integration; throws NumericalError when the
// tolerance cannot be met.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace bhc
