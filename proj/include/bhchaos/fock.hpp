#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bhchaos/util.hpp"

namespace bhc {

// Occupation-number vector of N bosons on L sites (or L single-particle modes).
using FockState = std::vector<int>;

enum class Bc { hwbc, pbc };

// Which one-particle basis the occupation numbers refer to. Sector
// construction is identical in both; only the symmetry action differs.
enum class FockKind { site, mode };

// Symmetry labels of one irreducible subspace. Q is the total quasimomentum
// (PBC only); parity refers to reflection about the chain centre. Leaving both
// absent selects the full N-particle space.
struct SectorSpec {
    Bc bc = Bc::hwbc;
    std::optional<int> Q;       // PBC only; implemented: Q = 0
    std::optional<int> parity;  // +1 or -1
    int N = 0;
    int L = 0;
    FockKind kind = FockKind::site;

    void validate() const;
    std::string label() const;
};

// Number of N-boson states on L modes, C(N+L-1, N).
std::uint64_t full_dimension(int N, int L);

// All Fock states in reverse-lexicographic order (first state [N,0,...,0]).
// Throws CapacityError if the dimension exceeds max_dim.
std::vector<FockState> enumerate_basis(int N, int L, std::uint64_t max_dim = 20'000'000);

// In-place successor in the enumeration order; false once the last state
// [0,...,0,N] is reached. Allows streaming without materializing the basis.
bool next_fock_state(FockState& s);

// Rank of s in enumerate_basis(N, L) order, via the combinatorial ranking
// formula (O(L), no lookup table). Throws DomainError if sum(occ) != N.
std::uint64_t state_index(const FockState& s, int N);

// Reflection j -> L+1-j (occupation vector reversal).
FockState reflect(const FockState& s);

// Cyclic shift by `shift` sites (PBC translation).
FockState translate(const FockState& s, int shift);

// One symmetry operation on occupation vectors: a site/mode permutation plus
// an optional occupation-dependent sign (-1)^(sum of occ over sign_mask).
// `character` is the 1-dim irrep character attached to the element.
struct SymmetryOp {
    std::vector<int> perm;          // out[i] = in[perm[i]]
    std::vector<std::uint8_t> sign_mask;  // empty = no sign
    int character = 1;

    void apply(const FockState& in, FockState& out, int& sign) const;
};

// Exact sector dimension by character-weighted Burnside counting; runs in
// O(|G| L N) without touching the Fock space. Used both as the fast path for
// dimension queries and as an oracle for the explicit construction.
std::uint64_t sector_dimension(const SectorSpec& spec);

// Symmetry-adapted orthonormal basis of one sector. Representatives are the
// lexicographically smallest states of each orbit; `norm(i)` is the amplitude
// 1/sqrt(orbit size) carried by every Fock state of the symmetrized vector.
class SectorBasis {
  public:
    static SectorBasis build(const SectorSpec& spec, std::uint64_t max_dim = 20'000'000);

    const SectorSpec& spec() const { return spec_; }
    std::int64_t dim() const { return static_cast<std::int64_t>(norms_.size()); }
    int sites() const { return spec_.L; }
    int particles() const { return spec_.N; }

    FockState rep(std::int64_t i) const;
    std::span<const std::uint8_t> rep_occ(std::int64_t i) const {
        return {rep_occ_.data() + i * spec_.L, static_cast<std::size_t>(spec_.L)};
    }
    double norm(std::int64_t i) const { return norms_[i]; }

    // Representative index of the orbit of `s`, or -1 if the symmetrized
    // projection of `s` vanishes (or `s` lies outside the sector).
    std::int64_t index_of(const FockState& s) const;

    // Canonical form: representative index and the phase phi = +-1 such that
    // P|s> = phi * P|rep>. found == false marks annihilated / foreign states.
    struct Canonical {
        std::int64_t index = -1;
        int phase = 1;
        bool found = false;
    };
    Canonical canonicalize(const FockState& s) const;

    const std::vector<SymmetryOp>& group() const { return group_; }

    // Dense symmetrized vectors in the full Fock space (small N, L only);
    // column i is the full-space representation of basis vector i.
    std::vector<double> dense_projection(std::uint64_t max_full_dim = 100'000) const;

  private:
    SectorSpec spec_;
    std::vector<std::uint8_t> rep_occ_;     // dim x L
    std::vector<double> norms_;
    std::vector<std::uint64_t> rep_rank_;   // full-basis ranks, ascending
    std::vector<SymmetryOp> group_;         // includes identity
    bool momentum_filter_ = false;          // mode-basis PBC: keep sum(k n_k) = 0 mod L

    bool in_filter(const FockState& s) const;
};

}  // namespace bhc
