#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhc {

// Error taxonomy; the CLI maps these onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {       // bad run configuration (exit 2)
    using Error::Error;
};
struct CapacityError : Error {     // requested problem exceeds configured limits (exit 3)
    using Error::Error;
};
struct NumericalError : Error {    // solver / quadrature failure (exit 4)
    using Error::Error;
};
struct DomainError : Error {       // contract violation on operation inputs
    using Error::Error;
};

// Exact binomial coefficients in 64-bit arithmetic. Throws CapacityError on
// overflow, which at the sizes handled here (n <= ~60) never triggers.
std::uint64_t binomial(int n, int k);

// Kahan-compensated accumulator for long plain sums.
class KahanSum {
  public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// SplitMix64, used to derive independent sub-stream seeds from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed;
    std::uint64_t a = splitmix64(x);
    x = a ^ (index * 0xD1B54A32D192ED03ULL + 1);
    return splitmix64(x);
}

// Deterministic Gaussian stream: mt19937_64 + Marsaglia polar method.
// The sampler is fixed here rather than taken from std::normal_distribution so
// that a given binary reproduces ensembles bit-for-bit.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_stream_seed(seed, stream)) {}

    double uniform() {  // (0,1)
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// FNV-1a over a string; used for config hashes in output metadata.
std::uint64_t fnv1a(const std::string& s);

std::string format_double(double v);  // shortest round-trip decimal

// Static work queue: runs fn(0..n_tasks-1) on `threads` workers. Tasks must
// write only to their own preallocated slots; exceptions are rethrown on the
// caller thread.
void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn);

}  // namespace bhc
