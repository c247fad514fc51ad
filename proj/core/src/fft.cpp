#include "mbo/fft.hpp"

#include <cmath>
#include <numbers>

namespace mbo {

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const size_t n = a.size();
    if (n < 2) return;
    // bit reversal
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cplx wl{std::cos(ang), std::sin(ang)};
        for (size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<cplx> grid_values(const SpectralField& f, int L) {
    std::vector<cplx> a(static_cast<size_t>(L), cplx{0.0, 0.0});
    for (int n = -f.n_max(); n <= f.n_max(); ++n) {
        const int bin = ((n % L) + L) % L;
        a[static_cast<size_t>(bin)] += f(n);
    }
    fft_pow2(a, true);
    return a;
}

SpectralField field_from_grid(const std::vector<cplx>& values, int n_max, bool is_real) {
    std::vector<cplx> a = values;
    const int L = static_cast<int>(a.size());
    fft_pow2(a, false);
    SpectralField f(n_max, is_real);
    const double inv = 1.0 / static_cast<double>(L);
    for (int n = -n_max; n <= n_max; ++n) {
        const int bin = ((n % L) + L) % L;
        f.at(n) = a[static_cast<size_t>(bin)] * inv;
    }
    return f;
}

}  // namespace mbo
