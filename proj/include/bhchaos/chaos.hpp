#pragma once

#include <array>
#include <map>
#include <optional>

#include "bhchaos/spectra.hpp"

namespace bhc {

// Adjacent-gap ratios r_n = min(s_{n+1}/s_n, s_n/s_{n+1}). Exact duplicate
// levels are collapsed first and reported, not silently dropped.
struct SpacingRatios {
    std::vector<double> r;        // one value per interior level of the deduplicated spectrum
    int degenerate_excluded = 0;  // number of exact zero spacings removed
};

SpacingRatios spacing_ratios(std::span<const double> energies_ascending);

inline constexpr double kQInf = std::numeric_limits<double>::infinity();

// Finite-size generalized fractal dimension of a unit vector: the scaled
// Renyi entropy -ln(R_q)/((q-1) ln dim), with the Shannon limit at q=1 and the
// max-intensity form at q=inf.
double gfd(std::span<const double> v, double q, std::int64_t dim);

struct MomentStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double var = 0.0;          // population variance
    double stderr_mean = 0.0;  // sqrt(var/count)
    std::optional<double> skew;  // signed; absent when count < 3 or var == 0
};

MomentStats moment_stats(std::span<const double> xs);

struct GfdRecord {
    std::int64_t state_index = 0;
    double E = 0.0;
    double eps = 0.0;
    double d1 = 0.0, d2 = 0.0, dinf = 0.0;
    std::map<double, double> dq_extra;
};

// GFDs of every stored eigenvector of a spectrum.
std::vector<GfdRecord> gfd_records(const Spectrum& s, std::span<const double> extra_q = {});

// Energy-resolved statistics over a uniform eps binning: per-bin mean r and
// moments of the fractal dimensions, plus the mean r over the inner p% of the
// levels. Bins holding fewer than min_count levels yield no moment output.
struct ScanCell {
    double eps_center = 0.0;
    std::int64_t n_levels = 0;
    std::optional<double> mean_r;
    std::int64_t n_r = 0;
    std::optional<MomentStats> d1, d2, dinf;
};

struct EtaScan {
    double eta = 0.0;
    std::vector<ScanCell> cells;
    std::array<int, 4> inner_percent{40, 60, 80, 100};
    std::array<double, 4> inner_r{};
    int degenerate_excluded = 0;
};

EtaScan scan_spectrum(double eta, const Spectrum& s, int bins = 100, bool with_gfds = true,
                      std::int64_t min_count = 10);

std::vector<EtaScan> energy_resolved_scan(std::span<const std::pair<double, Spectrum>> spectra,
                                          int bins = 100, bool with_gfds = true,
                                          std::int64_t min_count = 10);

}  // namespace bhc
