// SpectralField: Fourier coefficients of a 2pi-periodic function on the
// symmetric truncated lattice n in [-N, N], stored densely.  Coefficients
// follow the analysis convention  F f(n) = (1/2pi) \int f(x) e^{-inx} dx,
// so f(x) = sum_n c(n) e^{inx}.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mbo/errors.hpp"

namespace mbo {

using cplx = std::complex<double>;

class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(int n_max, bool is_real = false)
        : n_max_(n_max), is_real_(is_real), c_(2 * static_cast<size_t>(n_max) + 1) {}

    int n_max() const { return n_max_; }
    int size() const { return 2 * n_max_ + 1; }
    bool is_real() const { return is_real_; }
    void set_is_real(bool r) { is_real_ = r; }

    bool in_window(long long n) const { return n >= -n_max_ && n <= n_max_; }

    // Coefficient at mode n; zero outside the window.
    cplx operator()(long long n) const {
        return in_window(n) ? c_[static_cast<size_t>(n + n_max_)] : cplx{0.0, 0.0};
    }
    cplx& at(int n) { return c_[static_cast<size_t>(n + n_max_)]; }
    const cplx& at(int n) const { return c_[static_cast<size_t>(n + n_max_)]; }

    const std::vector<cplx>& raw() const { return c_; }
    std::vector<cplx>& raw() { return c_; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(cplx a);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(cplx a, SpectralField f) { return f *= a; }
    friend SpectralField operator*(SpectralField f, cplx a) { return f *= a; }

    double l2() const;                   // plain coefficient l2 norm
    double max_abs() const;
    // Largest deviation from the real-valuedness symmetry c(-n) = conj(c(n)).
    double conj_symmetry_defect() const;
    // Averages c(n) and conj(c(-n)); keeps a real-valued field exactly real.
    void symmetrize_real();

    std::string to_json() const;
    static SpectralField from_json(const std::string& text);

  private:
    int n_max_ = 0;
    bool is_real_ = false;
    std::vector<cplx> c_{cplx{0.0, 0.0}};
};

inline void require_same_window(const SpectralField& a, const SpectralField& b,
                                const char* where) {
    if (a.n_max() != b.n_max())
        throw SizeMismatch(std::string(where) + ": lattice half-widths differ");
}

}  // namespace mbo
