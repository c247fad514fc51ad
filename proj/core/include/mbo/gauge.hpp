// Gauge transform machinery for mbo_prime.  With F[u] = inv_dx(P_{!=c}(u^2))
// and nu = F u(0), the transformed unknown is
//     v = e^{-i sigma F[u]} (P_+ u + nu/2),
// and (d/dt + H dx^2) v equals a sum of quintic terms in v plus a smoother
// remainder R[u].  Both the grouped (v-substituted) and ungrouped forms of
// that right-hand side are implemented; their agreement is a self-test.
#pragma once

#include <array>
#include <map>

#include "mbo/solver.hpp"
#include "mbo/spectral.hpp"

namespace mbo {

struct GaugeWeights {
    SpectralField F_field;            // F[u]
    double nu = 0.0;                  // conserved mean of u
    int sigma = -1;
    std::map<int, SpectralField> exps;  // k -> coefficients of e^{i k sigma F[u]}

    const SpectralField& exp(int k) const { return exps.at(k); }
};

// F[u] = inv_dx(P_{!=c}(u^2)); real and mean-zero.
SpectralField gauge_F(const SpectralField& u,
                      ProductMode mode = ProductMode::padded_transform);

// Coefficients of e^{i k sigma F[u]}, via pointwise exponentiation on a grid
// oversampled 4x relative to the window, then truncation.
SpectralField gauge_exp(const SpectralField& u, int k, int sigma,
                        ProductMode mode = ProductMode::padded_transform);

// All four weights k in {+1,-1,+3,-3} (plus k=+3's mirror used by starred
// slots is exp(-(-3)) = exp(3), already covered).
GaugeWeights make_gauge_weights(const SpectralField& u, int sigma,
                                ProductMode mode = ProductMode::padded_transform);

struct GaugeTransformResult {
    SpectralField v;
    double nu = 0.0;
};

GaugeTransformResult gauge_transform(const SpectralField& u, int sigma,
                                     ProductMode mode = ProductMode::padded_transform);

// B(f,g) = inv_dx((P_+ dx f)(P_+ dx g) - (P_- dx f)(P_- dx g)).
// The argument of inv_dx is mean-free by construction; this is asserted.
SpectralField bilinear_B(const SpectralField& f, const SpectralField& g,
                         ProductMode mode = ProductMode::padded_transform);

// The remainder R[u]: nine summands built from the shared spectral
// primitives.  remainder_R_terms exposes the per-term breakdown.
std::array<SpectralField, 9> remainder_R_terms(const SpectralField& u, int sigma,
                                               ProductMode mode = ProductMode::padded_transform);
SpectralField remainder_R(const SpectralField& u, int sigma,
                          ProductMode mode = ProductMode::padded_transform);

// Right-hand side of (d/dt + H dx^2) v, grouped form (seven quintic terms in
// v and the gauge exponentials, plus R[u]).  Throws InconsistentPair when the
// reconstruction identity u = e^{i sigma F} v + e^{-i sigma F} conj(v) fails
// beyond `tol`.
SpectralField rhs_v(const SpectralField& u, const SpectralField& v, double nu,
                    int sigma, ProductMode mode = ProductMode::padded_transform,
                    double tol = 1e-6);

// Same right-hand side evaluated from the ungrouped display (u not yet
// substituted by v); used as the second route in the agreement self-test.
SpectralField rhs_v_pre_substitution(const SpectralField& u, int sigma,
                                     ProductMode mode = ProductMode::padded_transform);

// Analytic time derivative of e^{i k sigma F[u]} along the flow:
//   ik sigma e^{ik sigma F} (-2 P_{!=c}(u H dx u) - 2i B(u,u)
//                            + sigma P_{!=c}[(P_{!=c}(u^2))^2]).
SpectralField dt_gauge_exp(const SpectralField& u, int k, int sigma,
                           ProductMode mode = ProductMode::padded_transform);
// Same but reusing precomputed weights.
SpectralField dt_gauge_exp(const GaugeWeights& gw, const SpectralField& u, int k,
                           ProductMode mode = ProductMode::padded_transform);

struct LipschitzReport {
    bool degenerate = false;      // identical trajectories: 0/0
    double ratio = 0.0;           // sup_t ||u-u~||_{H^s} / (||du0||+||v-v~||_{C_T H^s})
    std::vector<double> horizons;
    std::vector<double> ratio_by_horizon;
};

// Empirical inverse-Lipschitz constant of the gauge transform on a pair of
// trajectories, reported against shrinking horizons.
LipschitzReport lipschitz_probe(const Trajectory& a, const Trajectory& b, double s,
                                ProductMode mode = ProductMode::padded_transform);

}  // namespace mbo
