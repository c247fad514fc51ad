// Exact periodic Fourier calculus on the truncated lattice: projections,
// Hilbert transform, derivative and primitive, dealiased products, and
// weighted sequence norms.  All functions are pure.
#pragma once

#include "mbo/field.hpp"

namespace mbo {

enum class Projection { plus, minus, mean, non_mean };
enum class ProductMode { exact_convolution, padded_transform };

// Fourier multiplier -i sgn(n), zero on the mean mode.
SpectralField hilbert(const SpectralField& f);

SpectralField project(const SpectralField& f, Projection which);

SpectralField dx(const SpectralField& f);
SpectralField dx2(const SpectralField& f);

// Periodic primitive: c(n)/(i n) for n != 0.  Requires |c(0)| <= 1e-12,
// otherwise throws NonZeroMean.
SpectralField inv_dx(const SpectralField& f);

// Pointwise complex conjugation of the underlying function:
// output(n) = conj(input(-n)).
SpectralField conj_field(const SpectralField& f);

// Truncated product: coefficients of f*g restricted to |n| <= N.
// exact_convolution is the direct double sum (the oracle); padded_transform
// zero-pads onto a power-of-two grid wide enough that no aliasing reaches
// the window, so the two modes agree to rounding.
SpectralField product(const SpectralField& f, const SpectralField& g,
                      ProductMode mode = ProductMode::padded_transform);

struct SobolevIndex {
    double s = 0.0;
};

// (sum_n (1+n^2)^s |c(n)|^2)^{1/2}
double sobolev_norm(const SpectralField& f, double s);
double sobolev_norm(const SpectralField& f, SobolevIndex s);

// <n>^s = (1+n^2)^{s/2}
double jp_weight(long long n, double s);

}  // namespace mbo
