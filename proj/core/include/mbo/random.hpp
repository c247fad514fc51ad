// Deterministic random streams.  All randomness in the library flows through
// Rng so that a (seed, stream) pair produces identical bytes on every
// platform; std::uniform_real_distribution is avoided on purpose since its
// output is implementation-defined.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "mbo/spectral.hpp"

namespace mbo {

class Rng {
  public:
    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : gen_(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1))) {}

    uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [lo, hi] inclusive
    long long uniform_int(long long lo, long long hi) {
        const auto span = static_cast<uint64_t>(hi - lo + 1);
        return lo + static_cast<long long>(gen_() % span);
    }

  private:
    std::mt19937_64 gen_;
};

// Real band-limited field with coefficients ~ <n>^{-decay} * uniform phase.
inline SpectralField random_real_field(int n_max, Rng& rng, double decay = 2.0,
                                       double amplitude = 1.0) {
    SpectralField f(n_max, true);
    for (int n = 1; n <= n_max; ++n) {
        const double mag = amplitude * jp_weight(n, -decay) * rng.uniform();
        const double ph = rng.uniform(0.0, 6.283185307179586);
        const cplx c{mag * std::cos(ph), mag * std::sin(ph)};
        f.at(n) = c;
        f.at(-n) = std::conj(c);
    }
    f.at(0) = cplx{amplitude * (2.0 * rng.uniform() - 1.0), 0.0};
    return f;
}

inline SpectralField random_complex_field(int n_max, Rng& rng, double amplitude = 1.0) {
    SpectralField f(n_max, false);
    for (int n = -n_max; n <= n_max; ++n)
        f.at(n) = amplitude * cplx{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    return f;
}

}  // namespace mbo
