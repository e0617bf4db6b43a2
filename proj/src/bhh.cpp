#include "bhchaos/bhh.hpp"

#include <cmath>
#include <numbers>

namespace bhc {

namespace {

void check_sector(const BhhParams& p, const SectorBasis& b, FockKind expected) {
    const auto& s = b.spec();
    if (s.N != p.N || s.L != p.L || s.bc != p.bc || s.kind != expected)
        throw DomainError("sector mismatch: basis " + s.label() + " does not fit the model parameters");
}

// single-particle mode frequencies, 1-based label k
double mode_phi(int k, int L, Bc bc) {
    if (bc == Bc::pbc) return 2.0 * std::numbers::pi * k / L;
    return std::numbers::pi * k / (L + 1);
}

}  // namespace

void BhhParams::validate() const {
    if (U <= 0) throw ConfigError("bhh: U must be > 0");
    if (J < 0) throw ConfigError("bhh: J must be >= 0");
    if (N < 1 || L < 1) throw ConfigError("bhh: need N >= 1 and L >= 1");
}

double delta_tensor(int k, int l, int m, int n, int L, Bc bc) {
    if (k < 1 || k > L || l < 1 || l > L || m < 1 || m > L || n < 1 || n > L)
        throw DomainError("delta_tensor: mode index out of [1, L]");
    if (bc == Bc::pbc) {
        int s = (k + l - m - n) % L;
        return (s % L + L) % L == 0 ? 1.0 / (2.0 * L) : 0.0;
    }
    const int mod = 2 * (L + 1);
    double acc = 0.0;
    for (int s1 = -1; s1 <= 1; s1 += 2)
        for (int s2 = -1; s2 <= 1; s2 += 2)
            for (int s3 = -1; s3 <= 1; s3 += 2) {
                int diff = (k + s1 * l) - (s2 * m + s3 * n);
                if (((diff % mod) + mod) % mod == 0) acc += s1 * s2 * s3;
            }
    return acc / (4.0 * (L + 1));
}

SymmetricMatrix build_interaction_H(const BhhParams& p, const SectorBasis& b) {
    p.validate();
    if (p.basis != BasisKind::interaction)
        throw DomainError("build_interaction_H: params select the tunneling basis");
    check_sector(p, b, FockKind::site);

    const int L = p.L;
    std::vector<std::pair<int, int>> bonds;
    for (int j = 0; j + 1 < L; ++j) bonds.emplace_back(j, j + 1);
    if (p.bc == Bc::pbc) bonds.emplace_back(L - 1, 0);

    const double U = p.U, J = p.J;
    FockState out;
    return build_in_sector(b, [&](const FockState& in, auto&& emit) {
        double diag = 0.0;
        for (int v : in) diag += static_cast<double>(v) * (v - 1);
        emit(in, 0.5 * U * diag);
        for (auto [a, c] : bonds) {
            // a_dag[a] a[c] and a_dag[c] a[a]
            if (in[c] > 0) {
                out = in;
                out[c] -= 1;
                out[a] += 1;
                emit(out, -J * std::sqrt(static_cast<double>(in[a] + 1) * in[c]));
            }
            if (in[a] > 0) {
                out = in;
                out[a] -= 1;
                out[c] += 1;
                emit(out, -J * std::sqrt(static_cast<double>(in[c] + 1) * in[a]));
            }
        }
    });
}

SymmetricMatrix build_tunneling_H(const BhhParams& p, const SectorBasis& b) {
    p.validate();
    if (p.basis != BasisKind::tunneling)
        throw DomainError("build_tunneling_H: params select the interaction basis");
    check_sector(p, b, FockKind::mode);

    const int L = p.L;
    // stored mode index i corresponds to label k = i+1 (HWBC) or momentum
    // 2*pi*i/L with i=0 the zero mode (PBC)
    std::vector<double> kinetic(L);
    for (int i = 0; i < L; ++i)
        kinetic[i] = -2.0 * p.J * std::cos(p.bc == Bc::pbc ? 2.0 * std::numbers::pi * i / L
                                                           : mode_phi(i + 1, L, p.bc));

    // nonzero Delta entries grouped by the annihilation pair (m <= n)
    struct Creation {
        int i, j;
        double w;  // Delta summed over the orderings collapsed below
    };
    std::vector<std::vector<Creation>> by_ann(L * L);
    auto delta0 = [&](int a, int bb, int c, int d) {  // 0-based stored indices
        if (p.bc == Bc::pbc) {
            int s = (a + bb - c - d) % L;
            return (s % L + L) % L == 0 ? 1.0 / (2.0 * L) : 0.0;
        }
        return delta_tensor(a + 1, bb + 1, c + 1, d + 1, L, p.bc);
    };
    // collapse the unrestricted sums over (k,l) and (m,n) onto ordered pairs:
    // for i != j the two orderings contribute twice the same operator
    for (int m = 0; m < L; ++m)
        for (int n = m; n < L; ++n) {
            auto& lst = by_ann[m * L + n];
            for (int i = 0; i < L; ++i)
                for (int j = i; j < L; ++j) {
                    double tot = delta0(i, j, m, n);
                    if (i != j) tot += delta0(j, i, m, n);
                    if (m != n) {
                        tot += delta0(i, j, n, m);
                        if (i != j) tot += delta0(j, i, n, m);
                    }
                    if (tot != 0.0) lst.push_back({i, j, tot});
                }
        }

    const double U = p.U;
    FockState out;
    return build_in_sector(b, [&](const FockState& in, auto&& emit) {
        double diag = 0.0;
        for (int i = 0; i < L; ++i) diag += kinetic[i] * in[i];
        emit(in, diag);
        for (int m = 0; m < L; ++m) {
            if (in[m] == 0) continue;
            for (int n = m; n < L; ++n) {
                if (in[n] == 0) continue;
                double ann = (m == n) ? static_cast<double>(in[m]) * (in[m] - 1)
                                      : static_cast<double>(in[m]) * in[n];
                if (ann <= 0.0) continue;
                double amp_ann = std::sqrt(ann);
                for (const auto& cr : by_ann[m * L + n]) {
                    out = in;
                    out[n] -= 1;
                    out[m] -= 1;
                    double amp_cr = std::sqrt(static_cast<double>(out[cr.j] + 1));
                    out[cr.j] += 1;
                    amp_cr *= std::sqrt(static_cast<double>(out[cr.i] + 1));
                    out[cr.i] += 1;
                    emit(out, U * cr.w * amp_ann * amp_cr);
                }
            }
        }
    });
}

SymmetricMatrix build_bhh(const BhhParams& p, const SectorBasis& b) {
    return p.basis == BasisKind::interaction ? build_interaction_H(p, b) : build_tunneling_H(p, b);
}

SectorSpec bhh_sector(const BhhParams& p, std::optional<int> Q, std::optional<int> parity) {
    SectorSpec s;
    s.bc = p.bc;
    s.Q = Q;
    s.parity = parity;
    s.N = p.N;
    s.L = p.L;
    s.kind = (p.basis == BasisKind::interaction) ? FockKind::site : FockKind::mode;
    s.validate();
    return s;
}

}  // namespace bhc
