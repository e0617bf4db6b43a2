#include "bhchaos/egoe.hpp"

#include <cmath>

namespace bhc {

void EgoeParams::validate() const {
    if (N < 1 || L < 1) throw ConfigError("egoe: need N >= 1 and L >= 1");
    if (lambda < 0) throw ConfigError("egoe: lambda must be >= 0");
}

GoeSample sample_goe(std::int64_t dim, std::uint64_t seed) {
    if (dim < 1) throw DomainError("sample_goe: dim >= 1");
    GoeSample s;
    s.dim = dim;
    s.seed = seed;
    s.matrix.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    Rng rng(seed, 0);
    const double sq2 = std::sqrt(2.0);
    for (std::int64_t i = 0; i < dim; ++i)
        for (std::int64_t j = i; j < dim; ++j) {
            double v = rng.gaussian() * (i == j ? sq2 : 1.0);
            s.matrix[i * dim + j] = v;
            s.matrix[j * dim + i] = v;
        }
    return s;
}

int pair_index(int i, int j, int L) {
    // pairs (i <= j) in row-major order
    return i * L - i * (i - 1) / 2 + (j - i);
}

namespace {

std::pair<int, int> pair_from_index(int p, int L) {
    for (int i = 0; i < L; ++i) {
        int row = L - i;
        if (p < row) return {i, i + p};
        p -= row;
    }
    throw DomainError("pair_from_index: out of range");
}

}  // namespace

EgoeDraws sample_egoe_draws(const EgoeParams& p) {
    p.validate();
    const int L = p.L;
    const int P = L * (L + 1) / 2;
    EgoeDraws d;
    d.L = L;
    d.g1.assign(static_cast<std::size_t>(L) * L, 0.0);
    d.g2.assign(static_cast<std::size_t>(P) * P, 0.0);
    Rng rng(p.seed, p.realization);
    const double sq2 = std::sqrt(2.0);

    auto mirror = [L](int i) { return L - 1 - i; };
    auto mirror_pair = [&](int i, int j) {
        int a = mirror(i), b = mirror(j);
        return a <= b ? std::pair{a, b} : std::pair{b, a};
    };

    // one-body draws; mirrored entries are copies of the orbit representative
    for (int i = 0; i < L; ++i)
        for (int j = i; j < L; ++j) {
            std::pair<int, int> key{i, j};
            if (p.reflection_symmetric) key = std::min(key, mirror_pair(i, j));
            double v;
            if (key == std::pair{i, j}) {
                v = rng.gaussian() * (i == j ? sq2 : 1.0);
            } else {
                v = d.g1[key.first * L + key.second];
            }
            d.g1[i * L + j] = v;
            d.g1[j * L + i] = v;
        }

    // two-body draws over ordered pairs; the orbit of (pq) under the mirror
    // and the pair swap determines the copies
    for (int pq = 0; pq < P; ++pq) {
        auto [i, j] = pair_from_index(pq, L);
        for (int rs = pq; rs < P; ++rs) {
            auto [k, l] = pair_from_index(rs, L);
            std::pair<int, int> key{pq, rs};
            if (p.reflection_symmetric) {
                int mp = pair_index(mirror_pair(i, j).first, mirror_pair(i, j).second, L);
                int mq = pair_index(mirror_pair(k, l).first, mirror_pair(k, l).second, L);
                std::pair<int, int> mk = mp <= mq ? std::pair{mp, mq} : std::pair{mq, mp};
                key = std::min(key, mk);
            }
            double v;
            if (key == std::pair{pq, rs}) {
                v = rng.gaussian() * (pq == rs ? sq2 : 1.0);
            } else {
                v = d.g2[key.first * P + key.second];
            }
            d.g2[pq * P + rs] = v;
            d.g2[rs * P + pq] = v;
        }
    }
    return d;
}

SymmetricMatrix egoe_matrix(const EgoeDraws& d, double lambda, const SectorBasis& b) {
    const int L = d.L;
    if (b.sites() != L) throw DomainError("egoe_matrix: basis has wrong number of modes");
    const int P = d.pair_count();

    // weights 1/sqrt((1+delta_ij)(1+delta_kl)) folded into the pair coefficients
    std::vector<double> w(P);
    for (int i = 0; i < L; ++i)
        for (int j = i; j < L; ++j) w[pair_index(i, j, L)] = (i == j) ? 1.0 / std::sqrt(2.0) : 1.0;
    std::vector<std::pair<int, int>> pairs(P);
    for (int i = 0; i < L; ++i)
        for (int j = i; j < L; ++j) pairs[pair_index(i, j, L)] = {i, j};

    FockState out;
    return build_in_sector(b, [&](const FockState& in, auto&& emit) {
        // H1: diagonal number part plus single-particle moves
        double diag = 0.0;
        for (int i = 0; i < L; ++i) diag += d.one_body(i, i) * in[i];
        emit(in, diag);
        for (int j = 0; j < L; ++j) {
            if (in[j] == 0) continue;
            for (int i = 0; i < L; ++i) {
                if (i == j) continue;
                double g = d.one_body(i, j);
                if (g == 0.0) continue;
                out = in;
                out[j] -= 1;
                out[i] += 1;
                emit(out, g * std::sqrt(static_cast<double>(in[i] + 1) * in[j]));
            }
        }
        if (lambda == 0.0) return;
        // H2: d+_i d+_j d_k d_l over ordered pairs
        for (int rs = 0; rs < P; ++rs) {
            auto [k, l] = pairs[rs];
            double ann = (k == l) ? static_cast<double>(in[k]) * (in[k] - 1)
                                  : static_cast<double>(in[k]) * in[l];
            if (ann <= 0.0) continue;
            double amp_ann = std::sqrt(ann);
            for (int pq = 0; pq < P; ++pq) {
                double g = d.two_body(pq, rs);
                if (g == 0.0) continue;
                auto [i, j] = pairs[pq];
                out = in;
                out[l] -= 1;
                out[k] -= 1;
                double amp_cr = std::sqrt(static_cast<double>(out[j] + 1));
                out[j] += 1;
                amp_cr *= std::sqrt(static_cast<double>(out[i] + 1));
                out[i] += 1;
                emit(out, lambda * w[pq] * w[rs] * g * amp_ann * amp_cr);
            }
        }
    });
}

SymmetricMatrix sample_egoe(const EgoeParams& p, const SectorBasis& b) {
    EgoeDraws d = sample_egoe_draws(p);
    return egoe_matrix(d, p.lambda, b);
}

}  // namespace bhc
