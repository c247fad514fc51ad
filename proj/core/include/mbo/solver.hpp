// Pseudospectral time integration of the periodic modified Benjamin-Ono
// family
//     d/dt u = -H dx^2 u + sigma u^2 dx u            (mbo)
//     d/dt u = -H dx^2 u + 2 sigma P_{!=c}(u^2) dx u (mbo_prime)
// with classical RK4 applied in the twisted variable e^{i t n|n|} F u(n),
// which integrates the linear flow exactly.
#pragma once

#include <string>
#include <vector>

#include "mbo/spectral.hpp"

namespace mbo {

enum class Equation { mbo, mbo_prime };

struct ConservedTriple {
    double mean = 0.0;     // F u(0)
    double mass_l2 = 0.0;  // \int u^2 dx
    double energy = 0.0;   // \int (1/2 u H dx u - sigma/12 u^4) dx
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    int sigma = -1;
    double dt = 0.0;
    std::string scheme_id = "rk4-twisted";

    const SpectralField& state_at(size_t k) const { return states[k]; }
    size_t samples() const { return states.size(); }
};

// Full right-hand side of mbo_prime (linear + nonlinear part).
SpectralField rhs_mbo_prime(const SpectralField& u, int sigma,
                            ProductMode mode = ProductMode::padded_transform);

ConservedTriple conserved(const SpectralField& u, int sigma,
                          ProductMode mode = ProductMode::padded_transform);

struct StepConfig {
    double dt = 1e-4;
    int sigma = -1;
    Equation equation = Equation::mbo_prime;
    ProductMode mode = ProductMode::padded_transform;
    double blowup_factor = 1e6;  // BlowupDetected threshold vs the run's initial norm
};

// One RK4 step in the twisted variable; dt > 0.
SpectralField step(const SpectralField& u, double dt, int sigma,
                   Equation eq = Equation::mbo_prime,
                   ProductMode mode = ProductMode::padded_transform);

// Integrate from u0 over [0, T], storing every `stride`-th state (and always
// the final one).  Checks the real-symmetry and zero-mean-nonlinearity
// invariants each step; throws BlowupDetected per config.
Trajectory integrate(const SpectralField& u0, double T, const StepConfig& cfg,
                     int stride = 1);

// Change of variables mapping an mbo trajectory onto an mbo_prime one:
// amplitude scaled by 2^{-1/2} and space translated by the accumulated
// mean of u^2 (cumulative trapezoid), realized as the phase e^{-in shift}.
Trajectory mbo_to_mbo_prime(const Trajectory& traj,
                            ProductMode mode = ProductMode::padded_transform);

struct TwinProbeReport {
    double divergence = 0.0;        // sup_t ||uA - uB||_{H^s}
    double est_err_coarse = 0.0;    // Richardson estimate for scheme A
    double est_err_fine = 0.0;      // Richardson estimate for scheme B
    std::vector<double> times;
    std::vector<double> divergence_by_time;
};

// Runs the same datum under two step sizes and compares, with one extra
// half-step run to estimate the finer scheme's own error.
TwinProbeReport twin_probe(const SpectralField& u0, const StepConfig& a,
                           const StepConfig& b, double T, double s);

}  // namespace mbo
