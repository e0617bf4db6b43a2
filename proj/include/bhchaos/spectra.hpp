#pragma once

#include <iosfwd>
#include <span>

#include "bhchaos/matrix.hpp"

namespace bhc {

// Eigenvalues (ascending) with scaled energies eps = (E - E_min)/(E_max -
// E_min) and, optionally, eigenvectors for a contiguous index window
// [vec_offset, vec_offset + vec_count). Full diagonalization stores the whole
// set; the windowed driver keeps only the requested targets.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<double> eps;  // empty when E_max == E_min
    double e_min = 0.0, e_max = 0.0;
    std::int64_t dim = 0;
    std::int64_t vec_offset = 0;
    std::int64_t vec_count = 0;
    std::vector<double> vectors;  // column-major dim x vec_count
    int degenerate_spacings = 0;  // exact zero spacings (eigenvector gauge marker)

    bool has_vector(std::int64_t idx) const {
        return idx >= vec_offset && idx < vec_offset + vec_count;
    }
    std::span<const double> vector(std::int64_t idx) const {
        return {vectors.data() + (idx - vec_offset) * dim, static_cast<std::size_t>(dim)};
    }
    void finalize();  // fills eps and the degeneracy count

    // little-endian dump of the stored eigenvector window: magic "BHCV",
    // version, dim, offset, count, then column-major doubles
    void write_vectors_binary(std::ostream& os) const;
};

inline constexpr std::int64_t kDefaultDenseCap = 16384;

// Dense symmetric eigensolver (LAPACK dsyevr). Throws CapacityError above the
// cap and NumericalError if the solver does not converge.
Spectrum full_diagonalize(const SymmetricMatrix& m, bool want_vectors,
                          std::int64_t dense_cap = kDefaultDenseCap);
Spectrum diagonalize_dense(std::vector<double> a, std::int64_t dim, bool want_vectors,
                           std::int64_t dense_cap = kDefaultDenseCap);

// All eigenvalues plus eigenvectors only for the k levels closest in eps to
// eps_target (one Householder reduction, then inverse iteration on the
// tridiagonal and a back-transform of the selected window).
Spectrum diagonalize_window(const SymmetricMatrix& m, double eps_target, std::int64_t k,
                            std::int64_t dense_cap = kDefaultDenseCap);
Spectrum diagonalize_window_dense(std::vector<double> a, std::int64_t dim, double eps_target,
                                  std::int64_t k, std::int64_t dense_cap = kDefaultDenseCap);

// Indices of the k eigenvalues closest to eps_target; ties resolve toward
// lower energy. Returns all indices when dim < k.
std::vector<std::int64_t> select_near_target(const Spectrum& s, double eps_target,
                                             std::int64_t k);

struct DosHistogram {
    std::vector<double> bin_edges;       // bins+1 uniform edges on [0,1]
    std::vector<std::int64_t> counts;    // right-open bins, last closed
    double eps_star = 0.0;               // centre of the maximum bin (ties: lower eps)
};

DosHistogram dos_histogram(const Spectrum& s, int bins = 100);

}  // namespace bhc
