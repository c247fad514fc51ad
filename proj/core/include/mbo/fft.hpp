// Minimal power-of-two complex FFT plus grid <-> coefficient transforms.
// Sizes here are small (a few hundred modes), so a self-contained radix-2
// kernel keeps results bit-reproducible across machines with no external
// dependency.
#pragma once

#include <vector>

#include "mbo/field.hpp"

namespace mbo {

// In-place radix-2 FFT; n must be a power of two.
// inverse=false computes X[k] = sum_j x[j] e^{-2pi i jk/n} (no scaling),
// inverse=true computes x[j] = sum_k X[k] e^{+2pi i jk/n} (no scaling).
void fft_pow2(std::vector<cplx>& a, bool inverse);

int next_pow2(int n);

// Physical-space samples v[j] = sum_n c(n) e^{i n x_j}, x_j = 2pi j / L.
// L must be a power of two with L >= size of the field window.
std::vector<cplx> grid_values(const SpectralField& f, int L);

// Forward transform of grid samples, truncated to the window [-n_max, n_max].
SpectralField field_from_grid(const std::vector<cplx>& values, int n_max, bool is_real);

}  // namespace mbo
