#pragma once

#include "bhchaos/matrix.hpp"

namespace bhc {

enum class BasisKind { interaction, tunneling };

// Bose-Hubbard couplings. The chaos control parameter eta = J/(U N) is always
// derived from (J, U, N), never stored.
struct BhhParams {
    double J = 1.0;  // tunneling strength
    double U = 1.0;  // on-site repulsion, > 0
    int N = 0;
    int L = 0;
    Bc bc = Bc::hwbc;
    BasisKind basis = BasisKind::interaction;

    double eta() const { return J / (U * N); }
    static BhhParams from_eta(double eta, int N, int L, Bc bc,
                              BasisKind basis = BasisKind::interaction, double U = 1.0) {
        return {eta * U * N, U, N, L, bc, basis};
    }
    void validate() const;
};

// Momentum-conservation tensor of the interaction in the tunneling basis;
// indices are 1-based mode labels. PBC: delta_{k+l,m+n (mod L)}/(2L).
// HWBC: sum over sigma signs with matching mod 2(L+1).
double delta_tensor(int k, int l, int m, int n, int L, Bc bc);

// H = H_tun + H_int over site occupations: diagonal (U/2) sum n(n-1) plus
// nearest-neighbour hops with bosonic matrix elements.
SymmetricMatrix build_interaction_H(const BhhParams& p, const SectorBasis& b);

// Same Hamiltonian over tunneling-mode occupations: diagonal kinetic part
// -2J sum cos(phi_k) n_k plus the Delta-tensor two-mode interaction.
SymmetricMatrix build_tunneling_H(const BhhParams& p, const SectorBasis& b);

SymmetricMatrix build_bhh(const BhhParams& p, const SectorBasis& b);

// Sector spec for the natural basis of the given parameters.
SectorSpec bhh_sector(const BhhParams& p, std::optional<int> Q, std::optional<int> parity);

}  // namespace bhc
