#include "bhchaos/chaos.hpp"

#include <algorithm>
#include <cmath>

namespace bhc {

SpacingRatios spacing_ratios(std::span<const double> energies) {
    SpacingRatios out;
    std::vector<double> e;
    e.reserve(energies.size());
    for (double x : energies) {
        if (!e.empty() && x == e.back()) {
            ++out.degenerate_excluded;
            continue;
        }
        if (!e.empty() && x < e.back()) throw DomainError("spacing_ratios: input not ascending");
        e.push_back(x);
    }
    if (e.size() < 3) {
        if (energies.size() >= 3)
            throw DomainError("spacing_ratios: spectrum fully degenerate after collapse");
        throw DomainError("spacing_ratios: need at least 3 levels");
    }
    out.r.reserve(e.size() - 2);
    for (std::size_t i = 0; i + 2 < e.size(); ++i) {
        double s0 = e[i + 1] - e[i], s1 = e[i + 2] - e[i + 1];
        out.r.push_back(std::min(s0 / s1, s1 / s0));
    }
    return out;
}

double gfd(std::span<const double> v, double q, std::int64_t dim) {
    if (dim < 2) throw DomainError("gfd: dim >= 2");
    if (!(q > 0)) throw DomainError("gfd: q > 0");
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (std::abs(n2 - 1.0) > 1e-8) throw DomainError("gfd: vector not normalized");
    const double logN = std::log(static_cast<double>(dim));
    if (q == kQInf) {
        double pmax = 0.0;
        for (double x : v) pmax = std::max(pmax, x * x);
        return -std::log(pmax) / logN;
    }
    if (q == 1.0) {
        KahanSum s;
        for (double x : v) {
            double p = x * x;
            if (p > 0.0) s.add(p * std::log(p));
        }
        return -s.value() / logN;
    }
    KahanSum rq;
    for (double x : v) {
        double p = x * x;
        if (p > 0.0) rq.add(std::pow(p, q));
    }
    return -std::log(rq.value()) / ((q - 1.0) * logN);
}

MomentStats moment_stats(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("moment_stats: need at least one sample");
    MomentStats m;
    m.count = static_cast<std::int64_t>(xs.size());
    KahanSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / m.count;
    KahanSum s2, s3;
    for (double x : xs) {
        double d = x - m.mean;
        s2.add(d * d);
        s3.add(d * d * d);
    }
    m.var = s2.value() / m.count;
    m.stderr_mean = std::sqrt(m.var / m.count);
    if (m.count >= 3 && m.var > 0.0)
        m.skew = (s3.value() / m.count) / std::pow(m.var, 1.5);
    return m;
}

std::vector<GfdRecord> gfd_records(const Spectrum& s, std::span<const double> extra_q) {
    std::vector<GfdRecord> out;
    out.reserve(s.vec_count);
    for (std::int64_t i = s.vec_offset; i < s.vec_offset + s.vec_count; ++i) {
        GfdRecord rec;
        rec.state_index = i;
        rec.E = s.eigenvalues[i];
        rec.eps = s.eps.empty() ? 0.0 : s.eps[i];
        auto v = s.vector(i);
        rec.d1 = gfd(v, 1.0, s.dim);
        rec.d2 = gfd(v, 2.0, s.dim);
        rec.dinf = gfd(v, kQInf, s.dim);
        for (double q : extra_q) rec.dq_extra[q] = gfd(v, q, s.dim);
        out.push_back(std::move(rec));
    }
    return out;
}

EtaScan scan_spectrum(double eta, const Spectrum& s, int bins, bool with_gfds,
                      std::int64_t min_count) {
    if (s.eps.empty()) throw DomainError("scan_spectrum: degenerate energy range");
    EtaScan scan;
    scan.eta = eta;
    scan.cells.resize(bins);
    for (int b = 0; b < bins; ++b) scan.cells[b].eps_center = (b + 0.5) / bins;

    auto bin_of = [bins](double x) { return std::min(static_cast<int>(x * bins), bins - 1); };
    for (double x : s.eps) ++scan.cells[bin_of(x)].n_levels;

    // r values on the duplicate-collapsed spectrum, attached to the central level
    std::vector<double> e = s.eigenvalues;
    e.erase(std::unique(e.begin(), e.end()), e.end());
    scan.degenerate_excluded = static_cast<int>(s.eigenvalues.size() - e.size());
    std::vector<std::vector<double>> bin_r(bins);
    std::vector<double> all_r;
    std::vector<std::int64_t> central;  // index of the central level in the collapsed list
    if (e.size() >= 3) {
        auto sr = spacing_ratios(e);
        all_r = sr.r;
        const double range = s.e_max - s.e_min;
        for (std::size_t i = 0; i < sr.r.size(); ++i) {
            double eps_c = (e[i + 1] - s.e_min) / range;
            bin_r[bin_of(eps_c)].push_back(sr.r[i]);
            central.push_back(static_cast<std::int64_t>(i + 1));
        }
    }

    for (int b = 0; b < bins; ++b) {
        auto& c = scan.cells[b];
        c.n_r = static_cast<std::int64_t>(bin_r[b].size());
        if (c.n_r >= min_count) c.mean_r = moment_stats(bin_r[b]).mean;
    }

    // inner p% means over the collapsed-level count
    const std::int64_t nl = static_cast<std::int64_t>(e.size());
    for (std::size_t pi = 0; pi < scan.inner_percent.size(); ++pi) {
        std::int64_t m = llround(nl * scan.inner_percent[pi] / 100.0);
        std::int64_t lo = (nl - m) / 2, hi = lo + m;
        KahanSum acc;
        std::int64_t cnt = 0;
        for (std::size_t i = 0; i < all_r.size(); ++i) {
            if (central[i] >= lo && central[i] < hi) {
                acc.add(all_r[i]);
                ++cnt;
            }
        }
        scan.inner_r[pi] = cnt > 0 ? acc.value() / cnt : std::numeric_limits<double>::quiet_NaN();
    }

    if (with_gfds && s.vec_count > 0) {
        std::vector<std::vector<double>> d1(bins), d2(bins), dinf(bins);
        for (std::int64_t i = s.vec_offset; i < s.vec_offset + s.vec_count; ++i) {
            int b = bin_of(s.eps[i]);
            auto v = s.vector(i);
            d1[b].push_back(gfd(v, 1.0, s.dim));
            d2[b].push_back(gfd(v, 2.0, s.dim));
            dinf[b].push_back(gfd(v, kQInf, s.dim));
        }
        for (int b = 0; b < bins; ++b) {
            if (static_cast<std::int64_t>(d1[b].size()) < min_count) continue;
            scan.cells[b].d1 = moment_stats(d1[b]);
            scan.cells[b].d2 = moment_stats(d2[b]);
            scan.cells[b].dinf = moment_stats(dinf[b]);
        }
    }
    return scan;
}

std::vector<EtaScan> energy_resolved_scan(std::span<const std::pair<double, Spectrum>> spectra,
                                          int bins, bool with_gfds, std::int64_t min_count) {
    std::vector<EtaScan> out;
    out.reserve(spectra.size());
    for (const auto& [eta, s] : spectra)
        out.push_back(scan_spectrum(eta, s, bins, with_gfds, min_count));
    return out;
}

}  // namespace bhc
