#include "bhchaos/compare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bhchaos/chaos.hpp"

namespace bhc {

double HistogramDensity::value_at(double x) const {
    if (edges.empty() || x < edges.front() || x > edges.back()) return 0.0;
    const double w = (edges.back() - edges.front()) / bins();
    int b = std::min(static_cast<int>((x - edges.front()) / w), bins() - 1);
    return density[b];
}

HistogramDensity histogram_density(std::span<const double> samples, int min_bins) {
    if (samples.empty()) throw DomainError("histogram_density: no samples");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    double lo = x.front(), hi = x.back();
    double q1 = x[static_cast<std::size_t>(0.25 * (n - 1))];
    double q3 = x[static_cast<std::size_t>(0.75 * (n - 1))];
    double iqr = q3 - q1;
    int bins = min_bins;
    if (iqr > 0 && hi > lo) {
        double fd_width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
        bins = std::max(min_bins, static_cast<int>(std::ceil((hi - lo) / fd_width)));
    }
    if (hi == lo) {  // degenerate sample set: widen artificially
        lo -= 0.5;
        hi += 0.5;
    }
    HistogramDensity h;
    h.n_samples = n;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    std::vector<std::int64_t> counts(bins, 0);
    const double w = (hi - lo) / bins;
    for (double v : x) ++counts[std::min(static_cast<int>((v - lo) / w), bins - 1)];
    h.density.resize(bins);
    for (int i = 0; i < bins; ++i) h.density[i] = counts[i] / (w * static_cast<double>(n));
    return h;
}

double gaussian_pdf(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double EdgeworthModel::unclipped(double x) const {
    double z = (x - mu) / sigma;
    double he3 = z * (z * z - 3.0);
    double he4 = z * z * (z * z - 6.0) + 3.0;
    double he6 = ((z * z - 15.0) * z * z + 45.0) * z * z - 15.0;
    double poly = 1.0 + gamma1 / 6.0 * he3 + gamma2 / 24.0 * he4 + gamma1 * gamma1 / 72.0 * he6;
    return gaussian_pdf(x, mu, sigma) * poly;
}

double EdgeworthModel::operator()(double x) const {
    return std::max(unclipped(x), 0.0) / norm;
}

EdgeworthModel edgeworth_fit(std::span<const double> samples) {
    if (samples.size() < 50) throw DomainError("edgeworth_fit: need at least 50 samples");
    auto ms = moment_stats(samples);
    if (ms.var <= 0.0) throw DomainError("edgeworth_fit: zero variance");
    EdgeworthModel m;
    m.mu = ms.mean;
    m.sigma = std::sqrt(ms.var);
    m.gamma1 = ms.skew.value_or(0.0);
    KahanSum k4;
    for (double v : samples) {
        double d = v - ms.mean;
        k4.add(d * d * d * d);
    }
    m.gamma2 = k4.value() / samples.size() / (ms.var * ms.var) - 3.0;

    // renormalize the clipped density by fine-grid quadrature
    const int ng = 4000;
    const double a = m.mu - 12.0 * m.sigma, b = m.mu + 12.0 * m.sigma;
    const double h = (b - a) / ng;
    KahanSum s;
    for (int i = 0; i <= ng; ++i) {
        double w = (i == 0 || i == ng) ? 0.5 : 1.0;
        s.add(w * std::max(m.unclipped(a + i * h), 0.0));
    }
    m.norm = s.value() * h;
    if (m.norm <= 0.0) throw NumericalError("edgeworth_fit: degenerate clipped density");
    return m;
}

double d_q_distance(double ref_mean, double test_mean, double test_var) {
    if (!(test_var > 0.0)) throw DomainError("d_q_distance: zero variance");
    return (ref_mean - test_mean) / std::sqrt(test_var);
}

double kl_divergence(const HistogramDensity& p, const std::function<double(double)>& q) {
    constexpr double floor = 1e-12;
    KahanSum s;
    for (int i = 0; i < p.bins(); ++i) {
        double w = p.edges[i + 1] - p.edges[i];
        double pi = std::max(p.density[i], floor);
        double qi = std::max(q(0.5 * (p.edges[i] + p.edges[i + 1])), floor);
        if (p.density[i] > 0.0) s.add(w * pi * std::log(pi / qi));
    }
    return s.value();
}

double integrated_squared_error(const HistogramDensity& p,
                                const std::function<double(double)>& q) {
    KahanSum s;
    for (int i = 0; i < p.bins(); ++i) {
        double w = p.edges[i + 1] - p.edges[i];
        double d = p.density[i] - q(0.5 * (p.edges[i] + p.edges[i + 1]));
        s.add(w * d * d);
    }
    return s.value();
}

double eps_egoe_map(double eps_bhh, double eta, const std::map<double, double>& dos_max_curve,
                    bool fold_upper) {
    auto it = dos_max_curve.lower_bound(eta - 1e-12);
    if (it == dos_max_curve.end() || std::abs(it->first - eta) > 1e-12)
        throw DomainError("eps_egoe_map: no eps* entry for eta=" + std::to_string(eta));
    double v = eps_bhh - it->second + 0.5;
    v = std::clamp(v, 0.0, 1.0);
    if (fold_upper && v > 0.5) v = 1.0 - v;
    return v;
}

double eps_egoe_percentile(double eps_bhh, std::span<const double> bhh_eps,
                           std::span<const double> egoe_eps) {
    if (bhh_eps.size() < 2 || egoe_eps.size() < 2)
        throw DomainError("eps_egoe_percentile: need at least 2 levels per spectrum");
    // cumulative fraction through the nodes (eps_k, k/(n-1)), both directions
    // piecewise linear; identical spectra then give the identity map
    auto frac_at = [](std::span<const double> e, double x) {
        const std::int64_t n = static_cast<std::int64_t>(e.size());
        if (x <= e.front()) return 0.0;
        if (x >= e.back()) return 1.0;
        auto it = std::upper_bound(e.begin(), e.end(), x);
        std::int64_t k = it - e.begin();  // e[k-1] <= x < e[k]
        double f0 = static_cast<double>(k - 1) / (n - 1);
        double f1 = static_cast<double>(k) / (n - 1);
        double t = (e[k] > e[k - 1]) ? (x - e[k - 1]) / (e[k] - e[k - 1]) : 0.0;
        return f0 + t * (f1 - f0);
    };
    double f = frac_at(bhh_eps, eps_bhh);
    // invert the EGOE fraction
    const std::int64_t n = static_cast<std::int64_t>(egoe_eps.size());
    double pos = f * (n - 1);
    std::int64_t k = std::min(static_cast<std::int64_t>(pos), n - 2);
    double t = pos - k;
    return egoe_eps[k] + t * (egoe_eps[k + 1] - egoe_eps[k]);
}

}  // namespace bhc
