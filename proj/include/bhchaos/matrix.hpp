#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <utility>
#include <vector>

#include "bhchaos/fock.hpp"

namespace bhc {

struct Triplet {
    std::int32_t row;
    std::int32_t col;
    double value;
};

// Real symmetric matrix in upper-triangle triplet form (row <= col), sorted by
// (row, col), exact zeros dropped. Dense conversion fills both triangles.
class SymmetricMatrix {
  public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::int64_t dim) : dim_(dim) {}

    // Merges duplicate positions, drops exact zeros, sorts by (row, col).
    static SymmetricMatrix from_triplets(std::int64_t dim, std::vector<Triplet> t);

    std::int64_t dim() const { return dim_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(triplets_.size()); }
    const std::vector<Triplet>& triplets() const { return triplets_; }

    std::vector<double> dense() const;  // row-major dim x dim
    double max_abs() const;

    void write_triplet_csv(std::ostream& os) const;
    void write_binary(std::ostream& os) const;  // little-endian: magic, dim, nnz, triplets

  private:
    std::int64_t dim_ = 0;
    std::vector<Triplet> triplets_;
};

// Structurally nonzero positions (upper triangle, as stored).
std::set<std::pair<std::int32_t, std::int32_t>> sparsity_pattern(const SymmetricMatrix& m);

// Assemble a symmetry-adapted operator matrix in a sector basis. `terms`
// receives each representative state and an emit callback; it must emit every
// Hamiltonian term target (including diagonal ones) with its raw Fock-space
// amplitude. The term set must be adjoint-complete, which makes the upper
// triangle assembled column-by-column exact.
template <class TermFn>
SymmetricMatrix build_in_sector(const SectorBasis& b, TermFn&& terms) {
    const std::int64_t d = b.dim();
    std::vector<Triplet> trips;
    std::vector<std::pair<std::int64_t, double>> col;
    FockState in;
    for (std::int64_t j = 0; j < d; ++j) {
        in = b.rep(j);
        col.clear();
        const double inv_norm_j = 1.0 / b.norm(j);
        terms(in, [&](const FockState& out, double amp) {
            if (amp == 0.0) return;
            auto c = b.canonicalize(out);
            if (!c.found || c.index > j) return;
            col.emplace_back(c.index, amp * c.phase * b.norm(c.index) * inv_norm_j);
        });
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b2) { return a.first < b2.first; });
        for (std::size_t k = 0; k < col.size();) {
            std::size_t e = k;
            double v = 0.0;
            while (e < col.size() && col[e].first == col[k].first) v += col[e++].second;
            if (v != 0.0)
                trips.push_back({static_cast<std::int32_t>(col[k].first),
                                 static_cast<std::int32_t>(j), v});
            k = e;
        }
    }
    return SymmetricMatrix::from_triplets(d, std::move(trips));
}

}  // namespace bhc
