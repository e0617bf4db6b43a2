#pragma once

#include "bhchaos/matrix.hpp"

namespace bhc {

// Bosonic two-body embedded ensemble H = H1 + lambda * H2. When
// reflection_symmetric is set, the one- and two-body Gaussians are drawn per
// orbit of the index mirror i -> L+1-i and copied to the mirrored entries, so
// every sample commutes with the chain reflection.
struct EgoeParams {
    int N = 0;
    int L = 0;
    double lambda = 1.0;
    bool reflection_symmetric = false;
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;  // stream index: draws come from (seed, realization)

    void validate() const;
};

// Plain GOE sample: dense symmetric, entries i<j ~ N(0,1), diagonal N(0,2).
struct GoeSample {
    std::int64_t dim = 0;
    std::vector<double> matrix;  // row-major dim x dim
    std::uint64_t seed = 0;
};

GoeSample sample_goe(std::int64_t dim, std::uint64_t seed);

// Underlying Gaussian draws of one EGOE realization (exposed for tests).
struct EgoeDraws {
    int L = 0;
    std::vector<double> g1;  // L x L symmetric one-body matrix
    std::vector<double> g2;  // P x P symmetric two-body matrix over pairs i<=j
    int pair_count() const { return L * (L + 1) / 2; }
    double one_body(int i, int j) const { return g1[i * L + j]; }
    double two_body(int p, int q) const { return g2[p * pair_count() + q]; }
};

int pair_index(int i, int j, int L);  // 0-based, requires i <= j

EgoeDraws sample_egoe_draws(const EgoeParams& p);

// EGOE Hamiltonian represented in a sector basis (or the full-space basis).
// With reflection_symmetric the matrix is block-pure in parity, so parity
// sector bases carry the exact blocks.
SymmetricMatrix sample_egoe(const EgoeParams& p, const SectorBasis& b);
SymmetricMatrix egoe_matrix(const EgoeDraws& d, double lambda, const SectorBasis& b);

}  // namespace bhc
