#include "bhchaos/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <lapacke.h>

namespace bhc {

void Spectrum::finalize() {
    dim = static_cast<std::int64_t>(eigenvalues.size());
    degenerate_spacings = 0;
    for (std::int64_t i = 0; i + 1 < dim; ++i)
        if (eigenvalues[i + 1] == eigenvalues[i]) ++degenerate_spacings;
    if (dim == 0) return;
    e_min = eigenvalues.front();
    e_max = eigenvalues.back();
    eps.clear();
    if (e_max > e_min) {
        eps.resize(dim);
        const double inv = 1.0 / (e_max - e_min);
        for (std::int64_t i = 0; i < dim; ++i) eps[i] = (eigenvalues[i] - e_min) * inv;
    }
}

void Spectrum::write_vectors_binary(std::ostream& os) const {
    const char magic[4] = {'B', 'H', 'C', 'V'};
    os.write(magic, 4);
    std::uint32_t version = 1;
    os.write(reinterpret_cast<const char*>(&version), 4);
    std::uint64_t d = static_cast<std::uint64_t>(dim), off = vec_offset, cnt = vec_count;
    os.write(reinterpret_cast<const char*>(&d), 8);
    os.write(reinterpret_cast<const char*>(&off), 8);
    os.write(reinterpret_cast<const char*>(&cnt), 8);
    os.write(reinterpret_cast<const char*>(vectors.data()),
             static_cast<std::streamsize>(vectors.size() * sizeof(double)));
}

namespace {

void check_cap(std::int64_t dim, std::int64_t cap) {
    if (dim > cap)
        throw CapacityError("diagonalize: dimension " + std::to_string(dim) +
                            " exceeds dense cap " + std::to_string(cap));
    if (dim < 1) throw DomainError("diagonalize: empty matrix");
}

}  // namespace

Spectrum diagonalize_dense(std::vector<double> a, std::int64_t dim, bool want_vectors,
                           std::int64_t dense_cap) {
    check_cap(dim, dense_cap);
    const lapack_int n = static_cast<lapack_int>(dim);
    Spectrum s;
    s.eigenvalues.resize(dim);
    lapack_int m = 0;
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(dim));
    if (want_vectors) {
        s.vectors.assign(static_cast<std::size_t>(dim) * dim, 0.0);
        lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, a.data(), n, 0, 0,
                                         0, 0, 0.0, &m, s.eigenvalues.data(), s.vectors.data(),
                                         n, isuppz.data());
        if (info != 0) throw NumericalError("dsyevr failed, info=" + std::to_string(info));
        s.vec_offset = 0;
        s.vec_count = dim;
    } else {
        lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'A', 'L', n, a.data(), n, 0, 0,
                                         0, 0, 0.0, &m, s.eigenvalues.data(), nullptr, n,
                                         isuppz.data());
        if (info != 0) throw NumericalError("dsyevr failed, info=" + std::to_string(info));
    }
    s.finalize();
    return s;
}

Spectrum full_diagonalize(const SymmetricMatrix& m, bool want_vectors, std::int64_t dense_cap) {
    check_cap(m.dim(), dense_cap);
    return diagonalize_dense(m.dense(), m.dim(), want_vectors, dense_cap);
}

Spectrum diagonalize_window_dense(std::vector<double> a, std::int64_t dim, double eps_target,
                                  std::int64_t k, std::int64_t dense_cap) {
    check_cap(dim, dense_cap);
    if (k < 1) throw DomainError("diagonalize_window: k >= 1");
    const lapack_int n = static_cast<lapack_int>(dim);

    // one Householder reduction; d/e/tau keep the tridiagonal and reflectors
    std::vector<double> d(dim), e(dim > 1 ? dim - 1 : 1), tau(dim > 1 ? dim - 1 : 1);
    lapack_int info = LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, d.data(), e.data(),
                                     tau.data());
    if (info != 0) throw NumericalError("dsytrd failed, info=" + std::to_string(info));

    Spectrum s;
    s.eigenvalues = d;
    std::vector<double> e_work = e;
    info = LAPACKE_dsterf(n, s.eigenvalues.data(), e_work.data());
    if (info != 0) throw NumericalError("dsterf failed, info=" + std::to_string(info));
    s.finalize();

    // pick the window of k levels closest to eps_target
    auto idx = select_near_target(s, eps_target, k);
    std::int64_t lo = *std::min_element(idx.begin(), idx.end());
    std::int64_t nv = static_cast<std::int64_t>(idx.size());

    std::vector<double> w(s.eigenvalues.begin() + lo, s.eigenvalues.begin() + lo + nv);
    std::vector<lapack_int> iblock(dim, 1), isplit(dim, 0), ifail(nv, 0);
    isplit[0] = n;
    std::vector<double> z(static_cast<std::size_t>(dim) * nv);
    info = LAPACKE_dstein(LAPACK_COL_MAJOR, n, d.data(), e.data(), static_cast<lapack_int>(nv),
                          w.data(), iblock.data(), isplit.data(), z.data(), n, ifail.data());
    if (info != 0) throw NumericalError("dstein failed, info=" + std::to_string(info));
    info = LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, static_cast<lapack_int>(nv),
                          a.data(), n, tau.data(), z.data(), n);
    if (info != 0) throw NumericalError("dormtr failed, info=" + std::to_string(info));

    s.vec_offset = lo;
    s.vec_count = nv;
    s.vectors = std::move(z);
    return s;
}

Spectrum diagonalize_window(const SymmetricMatrix& m, double eps_target, std::int64_t k,
                            std::int64_t dense_cap) {
    check_cap(m.dim(), dense_cap);
    return diagonalize_window_dense(m.dense(), m.dim(), eps_target, k, dense_cap);
}

std::vector<std::int64_t> select_near_target(const Spectrum& s, double eps_target,
                                             std::int64_t k) {
    if (k < 1) throw DomainError("select_near_target: k >= 1");
    if (s.eps.empty()) throw DomainError("select_near_target: degenerate energy range");
    std::vector<std::int64_t> idx(s.dim);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
        double da = std::abs(s.eps[a] - eps_target), db = std::abs(s.eps[b] - eps_target);
        if (da != db) return da < db;
        return a < b;  // ties toward lower energy
    });
    if (k < s.dim) idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

DosHistogram dos_histogram(const Spectrum& s, int bins) {
    if (s.dim < 2) throw DomainError("dos_histogram: need at least 2 eigenvalues");
    if (s.eps.empty()) throw DomainError("dos_histogram: degenerate energy range");
    if (bins < 1) throw DomainError("dos_histogram: bins >= 1");
    DosHistogram h;
    h.bin_edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.bin_edges[i] = static_cast<double>(i) / bins;
    h.counts.assign(bins, 0);
    for (double x : s.eps) {
        int b = std::min(static_cast<int>(x * bins), bins - 1);
        ++h.counts[b];
    }
    int best = 0;
    for (int i = 1; i < bins; ++i)
        if (h.counts[i] > h.counts[best]) best = i;
    h.eps_star = (best + 0.5) / bins;
    return h;
}

}  // namespace bhc
