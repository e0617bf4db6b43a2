#include "bhchaos/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>

#include "bhchaos/util.hpp"

namespace bhc {

SymmetricMatrix SymmetricMatrix::from_triplets(std::int64_t dim, std::vector<Triplet> t) {
    for (const auto& x : t) {
        if (x.row > x.col || x.row < 0 || x.col >= dim)
            throw DomainError("SymmetricMatrix: triplet outside upper triangle");
        if (!std::isfinite(x.value)) throw NumericalError("SymmetricMatrix: non-finite entry");
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SymmetricMatrix m(dim);
    m.triplets_.reserve(t.size());
    for (std::size_t k = 0; k < t.size();) {
        std::size_t e = k;
        double v = 0.0;
        while (e < t.size() && t[e].row == t[k].row && t[e].col == t[k].col) v += t[e++].value;
        if (v != 0.0) m.triplets_.push_back({t[k].row, t[k].col, v});
        k = e;
    }
    return m;
}

std::vector<double> SymmetricMatrix::dense() const {
    std::vector<double> a(static_cast<std::size_t>(dim_) * dim_, 0.0);
    for (const auto& t : triplets_) {
        a[static_cast<std::size_t>(t.row) * dim_ + t.col] = t.value;
        a[static_cast<std::size_t>(t.col) * dim_ + t.row] = t.value;
    }
    return a;
}

double SymmetricMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& t : triplets_) m = std::max(m, std::abs(t.value));
    return m;
}

void SymmetricMatrix::write_triplet_csv(std::ostream& os) const {
    os << "row,col,value\n";
    for (const auto& t : triplets_)
        os << t.row << ',' << t.col << ',' << format_double(t.value) << '\n';
}

void SymmetricMatrix::write_binary(std::ostream& os) const {
    const char magic[4] = {'B', 'H', 'C', 'M'};
    os.write(magic, 4);
    std::uint32_t version = 1;
    os.write(reinterpret_cast<const char*>(&version), 4);
    std::uint64_t d = static_cast<std::uint64_t>(dim_), n = triplets_.size();
    os.write(reinterpret_cast<const char*>(&d), 8);
    os.write(reinterpret_cast<const char*>(&n), 8);
    for (const auto& t : triplets_) {
        std::uint32_t r = t.row, c = t.col;
        os.write(reinterpret_cast<const char*>(&r), 4);
        os.write(reinterpret_cast<const char*>(&c), 4);
        os.write(reinterpret_cast<const char*>(&t.value), 8);
    }
}

std::set<std::pair<std::int32_t, std::int32_t>> sparsity_pattern(const SymmetricMatrix& m) {
    std::set<std::pair<std::int32_t, std::int32_t>> s;
    for (const auto& t : m.triplets()) s.emplace(t.row, t.col);
    return s;
}

}  // namespace bhc
