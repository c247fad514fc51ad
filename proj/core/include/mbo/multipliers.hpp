// The seven quintilinear multipliers, the harmless frequency regions A1/A2,
// the hat / double-hat splitting, and the resonance sets driving the
// normal-form recursion.
//
// Conventions.  Tuples are (n; n1..n5) with n = n1+...+n5 and phase
// Phi = n|n| - n1|n1| - n3|n3| - n5|n5|.  multiplier() returns the real part
// of the symbol; the transcription of the transformed equation onto the
// Fourier side carries one extra factor of i per unstarred symbol and -i per
// starred one (see complex_unit).  Starred symbols obey
// m_i^*(n, n1..n5) = m_i(-n, -n1..-n5).
#pragma once

#include <cstdlib>
#include <span>

#include "mbo/field.hpp"

namespace mbo {

struct MultiplierId {
    int i = 1;           // 1..7
    bool starred = false;
};

inline long long signed_square(long long n) { return n * std::llabs(n); }

inline long long phi(long long n, long long n1, long long n3, long long n5) {
    return signed_square(n) - signed_square(n1) - signed_square(n3) - signed_square(n5);
}

struct FreqTuple {
    long long n1 = 0, n2 = 0, n3 = 0, n4 = 0, n5 = 0;
    long long sum() const { return n1 + n2 + n3 + n4 + n5; }
    FreqTuple negated() const { return {-n1, -n2, -n3, -n4, -n5}; }
};

// Real multiplier value.  The constants in front are (per i = 1..7)
// -2 sigma, 2 sigma, 2 sigma, 4 sigma, 2 sigma, -2 sigma, 2 sigma; they are
// pinned by transcribing the transformed equation term by term and verified
// by the time-residual test.  Throws ConstraintViolated when n != n1+..+n5.
// Division guards: i in {3,4,5} return 0 when n123 = 0 and i in {6,7} when
// n2345 = 0; both are impossible under the sign indicators (asserted).
double multiplier(MultiplierId id, long long n, const FreqTuple& t, int sigma);

// i for unstarred symbols, -i for starred ones.
inline cplx complex_unit(MultiplierId id) {
    return id.starred ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
}

// Harmless frequency regions (eta small, default 2^-10).
bool in_A1(const FreqTuple& t, double eta);
bool in_A2(const FreqTuple& t, double eta);

struct HatSplit {
    double hat = 0.0;
    double hathat = 0.0;
};

// hat keeps tuples outside the harmless region with |Phi| > n2^2 v n4^2;
// hat + hathat equals the multiplier exactly and at most one is nonzero.
HatSplit hat_split(MultiplierId id, long long n, const FreqTuple& t, double eta, int sigma);
double hat_multiplier(MultiplierId id, long long n, const FreqTuple& t, double eta, int sigma);

// True when the hat support of group-A ids (i <= 5) collapses onto
// n2 = n4 = 0 for all tuples on this window; holds whenever
// eta^2 * n_max < 1 and eta * n_max < 1 (the desk-scale regime).
bool hat_collapse_valid(int n_max, double eta);

// Resonance sets over cumulative phases mu~_j = mu_1 + ... + mu_j:
//   J=1:   R = {|mu| <= M},                      NR = {|mu| > M}
//   J>=2:  NR = {|mu_1| > M, |mu~_j| > 2|mu~_{j-1}| for 2<=j<=J}
//          R  = same chain up to J-1, then |mu~_J| <= 2|mu~_{J-1}|.
bool in_resonant_set(std::span<const long long> phis, double M);
bool in_nonresonant_set(std::span<const long long> phis, double M);

}  // namespace mbo
