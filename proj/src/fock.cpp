#include "bhchaos/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bhc {

namespace {

int occupation_sum(const FockState& s) {
    return std::accumulate(s.begin(), s.end(), 0);
}

// Total quasimomentum index sum(k * n_k) mod L of a mode-basis state.
int momentum_class(const FockState& s) {
    int L = static_cast<int>(s.size());
    long long K = 0;
    for (int k = 0; k < L; ++k) K += static_cast<long long>(k) * s[k];
    return static_cast<int>(K % L);
}

std::vector<int> compose(const std::vector<int>& outer, const std::vector<int>& inner) {
    // (outer ∘ inner)(s): out[i] = s[inner[outer[i]]]
    std::vector<int> p(outer.size());
    for (std::size_t i = 0; i < outer.size(); ++i) p[i] = inner[outer[i]];
    return p;
}

std::vector<int> identity_perm(int L) {
    std::vector<int> p(L);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

std::vector<int> reflect_perm(int L) {
    std::vector<int> p(L);
    for (int i = 0; i < L; ++i) p[i] = L - 1 - i;
    return p;
}

std::vector<int> translate_perm(int L, int t) {
    std::vector<int> p(L);
    for (int i = 0; i < L; ++i) p[i] = ((i - t) % L + L) % L;
    return p;
}

std::vector<int> mode_mirror_perm(int L) {
    // k -> L-k (mod L); index 0 is the zero-momentum mode
    std::vector<int> p(L);
    for (int i = 0; i < L; ++i) p[i] = (L - i) % L;
    return p;
}

// Symmetry group of a sector, identity first. For mode-basis PBC the
// translations act diagonally and are handled by the momentum filter, so only
// the mirror enters the orbit group.
std::vector<SymmetryOp> make_group(const SectorSpec& spec, bool& momentum_filter) {
    momentum_filter = false;
    std::vector<SymmetryOp> g;
    g.push_back({identity_perm(spec.L), {}, 1});
    int pi = spec.parity.value_or(0);

    if (spec.kind == FockKind::site) {
        if (spec.bc == Bc::pbc && spec.Q.has_value()) {
            for (int t = 1; t < spec.L; ++t) g.push_back({translate_perm(spec.L, t), {}, 1});
            if (pi != 0) {
                for (int t = 0; t < spec.L; ++t)
                    g.push_back({compose(reflect_perm(spec.L), translate_perm(spec.L, t)), {}, pi});
            }
        } else if (pi != 0) {
            g.push_back({reflect_perm(spec.L), {}, pi});
        }
    } else {
        if (spec.bc == Bc::hwbc) {
            if (pi != 0) {
                // reflection maps b_k -> (-1)^(k+1) b_k: diagonal sign on even k (odd index)
                std::vector<std::uint8_t> mask(spec.L, 0);
                for (int i = 1; i < spec.L; i += 2) mask[i] = 1;
                g.push_back({identity_perm(spec.L), mask, pi});
            }
        } else {
            if (spec.Q.has_value()) momentum_filter = true;
            if (pi != 0) g.push_back({mode_mirror_perm(spec.L), {}, pi});
        }
    }
    return g;
}

// Signed count of occupation states fixed by `op` with total particle number
// N: fixed states are constant on permutation cycles; masked positions weight
// each cycle occupation v by (-1)^(m v) with m the masked count in the cycle.
long long signed_fixed_count(const SymmetryOp& op, int N) {
    int L = static_cast<int>(op.perm.size());
    std::vector<char> seen(L, 0);
    std::vector<std::pair<int, int>> cycles;  // (length, masked count)
    for (int i = 0; i < L; ++i) {
        if (seen[i]) continue;
        int len = 0, masked = 0, j = i;
        while (!seen[j]) {
            seen[j] = 1;
            ++len;
            if (!op.sign_mask.empty() && op.sign_mask[j]) ++masked;
            j = op.perm[j];
        }
        cycles.emplace_back(len, masked);
    }
    std::vector<long long> ways(N + 1, 0);
    ways[0] = 1;
    for (auto [len, masked] : cycles) {
        std::vector<long long> next(N + 1, 0);
        for (int n = 0; n <= N; ++n) {
            if (ways[n] == 0) continue;
            for (int v = 0; n + v * len <= N; ++v) {
                long long w = (masked % 2 == 1 && v % 2 == 1) ? -ways[n] : ways[n];
                next[n + v * len] += w;
            }
        }
        ways.swap(next);
    }
    return ways[N];
}

}  // namespace

void SectorSpec::validate() const {
    if (N < 0 || L < 1) throw ConfigError("sector: need N >= 0 and L >= 1");
    if (bc == Bc::hwbc && Q.has_value()) throw ConfigError("sector: Q is a PBC label");
    if (Q.has_value()) {
        if (*Q < 0 || *Q >= L) throw ConfigError("sector: Q out of range [0, L-1]");
        if (*Q != 0) throw ConfigError("unsupported sector: PBC with Q != 0 (complex-Hermitian block)");
        if (parity.has_value() && !(*Q == 0 || 2 * *Q == L))
            throw ConfigError("sector: parity requires Q = 0 or Q = L/2");
    }
    if (bc == Bc::pbc && parity.has_value() && !Q.has_value())
        throw ConfigError("sector: PBC parity requires a Q label");
    if (parity.has_value() && *parity != 1 && *parity != -1)
        throw ConfigError("sector: parity must be +1 or -1");
}

std::string SectorSpec::label() const {
    std::string s = (bc == Bc::hwbc) ? "hwbc" : "pbc";
    if (Q) s += "/Q=" + std::to_string(*Q);
    if (parity) s += (*parity > 0 ? "/pi=+1" : "/pi=-1");
    if (!Q && !parity) s += "/full";
    s += (kind == FockKind::site) ? "/site" : "/mode";
    return s;
}

std::uint64_t full_dimension(int N, int L) {
    return binomial(N + L - 1, N);
}

bool next_fock_state(FockState& s) {
    int L = static_cast<int>(s.size());
    int k = -1;
    for (int j = L - 2; j >= 0; --j) {
        if (s[j] > 0) {
            k = j;
            break;
        }
    }
    if (k < 0) return false;
    int tail = 0;
    for (int j = k + 1; j < L; ++j) {
        tail += s[j];
        s[j] = 0;
    }
    s[k] -= 1;
    s[k + 1] = tail + 1;
    return true;
}

std::vector<FockState> enumerate_basis(int N, int L, std::uint64_t max_dim) {
    if (N < 0 || L < 1) throw DomainError("enumerate_basis: need N >= 0, L >= 1");
    std::uint64_t dim = full_dimension(N, L);
    if (dim > max_dim)
        throw CapacityError("enumerate_basis: dimension " + std::to_string(dim) +
                            " exceeds configured maximum " + std::to_string(max_dim));
    std::vector<FockState> basis;
    basis.reserve(dim);
    FockState s(L, 0);
    s[0] = N;
    basis.push_back(s);
    while (next_fock_state(s)) basis.push_back(s);
    return basis;
}

std::uint64_t state_index(const FockState& s, int N) {
    int L = static_cast<int>(s.size());
    if (occupation_sum(s) != N) throw DomainError("state_index: occupation sum != N");
    std::uint64_t rank = 0;
    int rem = N;
    for (int j = 0; j < L - 1; ++j) {
        int slots = L - j - 1;  // positions right of j
        if (rem - s[j] - 1 >= 0) rank += binomial(rem - s[j] - 1 + slots, slots);
        rem -= s[j];
    }
    return rank;
}

FockState reflect(const FockState& s) {
    return FockState(s.rbegin(), s.rend());
}

FockState translate(const FockState& s, int shift) {
    int L = static_cast<int>(s.size());
    FockState out(L);
    for (int i = 0; i < L; ++i) out[i] = s[((i - shift) % L + L) % L];
    return out;
}

void SymmetryOp::apply(const FockState& in, FockState& out, int& sign) const {
    int L = static_cast<int>(perm.size());
    out.resize(L);
    for (int i = 0; i < L; ++i) out[i] = in[perm[i]];
    sign = 1;
    if (!sign_mask.empty()) {
        int m = 0;
        for (int i = 0; i < L; ++i)
            if (sign_mask[i]) m += in[i];
        if (m % 2) sign = -1;
    }
}

std::uint64_t sector_dimension(const SectorSpec& spec_in) {
    SectorSpec spec = spec_in;
    spec.validate();
    // mode-basis sectors are unitarily equivalent to their site-basis partners
    spec.kind = FockKind::site;
    bool filter = false;
    auto group = make_group(spec, filter);
    long long acc = 0;
    for (const auto& op : group) acc += op.character * signed_fixed_count(op, spec.N);
    long long order = static_cast<long long>(group.size());
    if (acc % order != 0 || acc < 0) throw NumericalError("sector_dimension: Burnside count not integral");
    return static_cast<std::uint64_t>(acc / order);
}

bool SectorBasis::in_filter(const FockState& s) const {
    return !momentum_filter_ || momentum_class(s) == 0;
}

SectorBasis SectorBasis::build(const SectorSpec& spec, std::uint64_t max_dim) {
    spec.validate();
    std::uint64_t dfull = full_dimension(spec.N, spec.L);
    if (dfull > max_dim)
        throw CapacityError("sector basis: full dimension " + std::to_string(dfull) +
                            " exceeds configured maximum " + std::to_string(max_dim));

    SectorBasis b;
    b.spec_ = spec;
    b.group_ = make_group(spec, b.momentum_filter_);

    FockState s(spec.L, 0), mapped(spec.L);
    s[0] = spec.N;
    std::vector<FockState> orbit;
    std::uint64_t rank = 0;
    do {
        if (!b.in_filter(s)) {
            ++rank;
            continue;
        }
        bool minimal = true, killed = false;
        orbit.clear();
        for (const auto& op : b.group_) {
            int sign;
            op.apply(s, mapped, sign);
            if (mapped < s) {
                minimal = false;
                break;
            }
            if (mapped == s && op.character * sign == -1) {
                killed = true;
                break;
            }
            orbit.push_back(mapped);
        }
        if (!minimal || killed) {
            ++rank;
            continue;
        }
        std::sort(orbit.begin(), orbit.end());
        orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
        for (int v : s) b.rep_occ_.push_back(static_cast<std::uint8_t>(v));
        b.norms_.push_back(1.0 / std::sqrt(static_cast<double>(orbit.size())));
        b.rep_rank_.push_back(rank);
        ++rank;
    } while (next_fock_state(s));
    return b;
}

FockState SectorBasis::rep(std::int64_t i) const {
    auto occ = rep_occ(i);
    return FockState(occ.begin(), occ.end());
}

SectorBasis::Canonical SectorBasis::canonicalize(const FockState& s) const {
    Canonical c;
    if (!in_filter(s)) return c;
    FockState best, mapped;
    int best_phase = 1;
    for (const auto& op : group_) {
        int sign;
        op.apply(s, mapped, sign);
        if (best.empty() || mapped < best) {
            best = mapped;
            best_phase = op.character * sign;
        }
    }
    std::uint64_t r = state_index(best, spec_.N);
    auto it = std::lower_bound(rep_rank_.begin(), rep_rank_.end(), r);
    if (it == rep_rank_.end() || *it != r) return c;
    c.index = it - rep_rank_.begin();
    c.phase = best_phase;
    c.found = true;
    return c;
}

std::int64_t SectorBasis::index_of(const FockState& s) const {
    auto c = canonicalize(s);
    return c.found ? c.index : -1;
}

std::vector<double> SectorBasis::dense_projection(std::uint64_t max_full_dim) const {
    std::uint64_t dfull = full_dimension(spec_.N, spec_.L);
    if (dfull > max_full_dim) throw CapacityError("dense_projection: full space too large");
    std::size_t nf = static_cast<std::size_t>(dfull);
    std::size_t d = static_cast<std::size_t>(dim());
    std::vector<double> cols(nf * d, 0.0);
    FockState mapped;
    for (std::size_t i = 0; i < d; ++i) {
        FockState r = rep(static_cast<std::int64_t>(i));
        double* col = cols.data() + i * nf;
        for (const auto& op : group_) {
            int sign;
            op.apply(r, mapped, sign);
            col[state_index(mapped, spec_.N)] += op.character * sign;
        }
        double nrm = 0;
        for (std::size_t k = 0; k < nf; ++k) nrm += col[k] * col[k];
        nrm = std::sqrt(nrm);
        if (nrm == 0) throw NumericalError("dense_projection: vanishing projection for stored representative");
        for (std::size_t k = 0; k < nf; ++k) col[k] /= nrm;
    }
    return cols;
}

}  // namespace bhc
