#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "bhchaos/util.hpp"

namespace bhc {

// Normalized empirical density: sum(density * bin width) == 1.
struct HistogramDensity {
    std::vector<double> edges;    // bins+1
    std::vector<double> density;  // bins
    std::int64_t n_samples = 0;

    int bins() const { return static_cast<int>(density.size()); }
    double value_at(double x) const;  // 0 outside the support
};

// Freedman-Diaconis binning with a floor of min_bins bins.
HistogramDensity histogram_density(std::span<const double> samples, int min_bins = 20);

// Gaussian times the second-order Hermite correction determined by the sample
// skewness and excess kurtosis; clipped at zero and renormalized.
struct EdgeworthModel {
    double mu = 0.0;
    double sigma = 1.0;
    double gamma1 = 0.0;  // skewness
    double gamma2 = 0.0;  // excess kurtosis
    double norm = 1.0;    // renormalization after clipping

    double operator()(double x) const;
    double unclipped(double x) const;
};

EdgeworthModel edgeworth_fit(std::span<const double> samples);  // needs >= 50 samples

double gaussian_pdf(double x, double mu, double sigma);

// Mean-difference distance (reference minus test) in units of the test
// standard deviation.
double d_q_distance(double ref_mean, double test_mean, double test_var);

// Riemann-sum relative entropy of the histogram P against the density Q,
// both floored at 1e-12 before the log.
double kl_divergence(const HistogramDensity& p, const std::function<double(double)>& q);

// Integrated squared error between the histogram and a model density over the
// histogram support (used to rank DOS fits).
double integrated_squared_error(const HistogramDensity& p,
                                const std::function<double(double)>& q);

// Energy correspondence by bulk-centre alignment: eps_egoe = eps_bhh -
// eps_star(eta) + 1/2, clamped to [0,1]. With fold_upper, values above 1/2
// are reflected (ensemble-averaged EGOE statistics are eps <-> 1-eps
// symmetric). The curve must contain eta exactly (1e-12 tolerance).
double eps_egoe_map(double eps_bhh, double eta, const std::map<double, double>& dos_max_curve,
                    bool fold_upper = false);

// Energy correspondence by spectral percentile: the eps at which the EGOE
// cumulative level fraction matches the BHH one (linear interpolation).
double eps_egoe_percentile(double eps_bhh, std::span<const double> bhh_eps,
                           std::span<const double> egoe_eps);

struct DistanceReport {
    std::string pair;   // e.g. "goe-bhh"
    std::string q;      // "1", "2" or "inf"
    double d_q = 0.0;
    double kl = 0.0;
    std::int64_t n_samples = 0;
};

}  // namespace bhc
