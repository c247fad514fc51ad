#include "mbo/spectral.hpp"

#include <cmath>

#include "mbo/fft.hpp"

namespace mbo {

SpectralField hilbert(const SpectralField& f) {
    SpectralField out(f.n_max(), f.is_real());
    for (int n = -f.n_max(); n <= f.n_max(); ++n) {
        if (n > 0)
            out.at(n) = cplx{0.0, -1.0} * f(n);
        else if (n < 0)
            out.at(n) = cplx{0.0, 1.0} * f(n);
    }
    return out;
}

SpectralField project(const SpectralField& f, Projection which) {
    // Only `mean` and `non_mean` preserve real-valuedness.
    const bool keeps_real =
        f.is_real() && (which == Projection::mean || which == Projection::non_mean);
    SpectralField out(f.n_max(), keeps_real);
    for (int n = -f.n_max(); n <= f.n_max(); ++n) {
        const bool keep = (which == Projection::plus && n > 0) ||
                          (which == Projection::minus && n < 0) ||
                          (which == Projection::mean && n == 0) ||
                          (which == Projection::non_mean && n != 0);
        if (keep) out.at(n) = f(n);
    }
    return out;
}

SpectralField dx(const SpectralField& f) {
    SpectralField out(f.n_max(), f.is_real());
    for (int n = -f.n_max(); n <= f.n_max(); ++n)
        out.at(n) = cplx{0.0, static_cast<double>(n)} * f(n);
    return out;
}

SpectralField dx2(const SpectralField& f) {
    SpectralField out(f.n_max(), f.is_real());
    for (int n = -f.n_max(); n <= f.n_max(); ++n)
        out.at(n) = -static_cast<double>(n) * static_cast<double>(n) * f(n);
    return out;
}

SpectralField inv_dx(const SpectralField& f) {
    if (std::abs(f(0)) > 1e-12)
        throw NonZeroMean("inv_dx: input has nonzero mean " + std::to_string(std::abs(f(0))));
    SpectralField out(f.n_max(), f.is_real());
    for (int n = -f.n_max(); n <= f.n_max(); ++n) {
        if (n == 0) continue;
        out.at(n) = f(n) / cplx{0.0, static_cast<double>(n)};
    }
    return out;
}

SpectralField conj_field(const SpectralField& f) {
    SpectralField out(f.n_max(), f.is_real());
    for (int n = -f.n_max(); n <= f.n_max(); ++n) out.at(n) = std::conj(f(-n));
    return out;
}

namespace {

SpectralField product_exact(const SpectralField& f, const SpectralField& g) {
    const int N = f.n_max();
    SpectralField out(N, f.is_real() && g.is_real());
    for (int n = -N; n <= N; ++n) {
        cplx acc{0.0, 0.0};
        for (int n1 = -N; n1 <= N; ++n1) {
            const int n2 = n - n1;
            if (n2 < -N || n2 > N) continue;
            acc += f(n1) * g(n2);
        }
        out.at(n) = acc;
    }
    return out;
}

SpectralField product_padded(const SpectralField& f, const SpectralField& g) {
    const int N = f.n_max();
    // Convolution support is [-2N, 2N]; wrap-around on a length-L cyclic grid
    // maps k to k +- L, which misses the window once L >= 3N + 1.
    const int L = next_pow2(3 * N + 1);
    auto a = grid_values(f, L);
    const auto b = grid_values(g, L);
    for (size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
    return field_from_grid(a, N, f.is_real() && g.is_real());
}

}  // namespace

SpectralField product(const SpectralField& f, const SpectralField& g, ProductMode mode) {
    require_same_window(f, g, "product");
    return mode == ProductMode::exact_convolution ? product_exact(f, g)
                                                  : product_padded(f, g);
}

double jp_weight(long long n, double s) {
    return std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), 0.5 * s);
}

double sobolev_norm(const SpectralField& f, double s) {
    double acc = 0.0;
    for (int n = -f.n_max(); n <= f.n_max(); ++n) {
        const double w = std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), s);
        acc += w * std::norm(f(n));
    }
    return std::sqrt(acc);
}

double sobolev_norm(const SpectralField& f, SobolevIndex s) { return sobolev_norm(f, s.s); }

}  // namespace mbo
