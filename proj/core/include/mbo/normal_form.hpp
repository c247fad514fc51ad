// Fourier-side normal-form machinery.  The twisted unknown is
// omega(t,n) = e^{i t n|n|} F v(t,n), and its equation reads
//   d/dt omega = sum_{i=1..7} Q_i(e^{i t Phi} hat m_i; u, omega) + R0,
// where Q_i are quintilinear forms whose five slots take omega, omega*, or a
// gauge exponential per a fixed table, and R0 collects the double-hat pieces
// plus the twisted remainder.  Repeated integration by parts in time then
// produces, per generation J, the boundary / resonant / weight-derivative /
// remainder-substitution / next-generation term families evaluated here.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mbo/gauge.hpp"
#include "mbo/multipliers.hpp"
#include "mbo/solver.hpp"
#include "mbo/trees.hpp"

namespace mbo {

struct TwistedState {
    double t = 0.0;
    SpectralField omega;
    SpectralField omega_star;  // omega*(n) = conj(omega(-n))
};

// Twist a single complex state or a whole trajectory of them.
TwistedState twist(double t, const SpectralField& v);
std::vector<TwistedState> twist(const std::vector<double>& times,
                                const std::vector<SpectralField>& v_states);
// Inverse: F v(n) = e^{-i t n|n|} omega(n).
SpectralField untwist(const TwistedState& st);

struct Slot {
    enum Kind : uint8_t { state, state_star, weight };
    Kind kind = state;
    int k = 0;  // gauge exponent index for weight slots
};

// Slot table of Q_i; starred variants swap state <-> state_star and negate k.
std::array<Slot, 5> slot_pattern(MultiplierId id);

enum class Family { boundary, resonant, weight_dt, remainder, next };

struct TermDescriptor {
    Family family = Family::boundary;
    int J = 1;
    double M = 64.0;
    double eta = 0x1p-10;
};

std::string family_name(Family f);

// Everything the family evaluators need at one sample time, precomputed.
struct NfSample {
    double t = 0.0;
    int sigma = -1;
    double eta = 0x1p-10;
    ProductMode mode = ProductMode::padded_transform;

    SpectralField u;
    SpectralField v;
    double nu = 0.0;
    TwistedState ts;
    GaugeWeights gw;

    // W_k(0) and d/dt W_k(0) for k in {1,-1,3,-3}
    std::map<int, cplx> w0;
    std::map<int, cplx> dw0;
    std::map<int, SpectralField> dw_field;  // full d/dt W_k fields

    SpectralField hat_n1;  // N^{(1)} = sum_i Q_i(e^{itPhi} hat m_i)
    SpectralField r0;      // R^{(0)}
};

NfSample make_nf_sample(double t, const SpectralField& u, int sigma, double eta,
                        ProductMode mode = ProductMode::padded_transform);

// Generic quintilinear form, brute force over the window:
//   out(n) = sum_{n=n1+..+n5} weight(n, tuple) l1(n1) l2(n2) l3(n3) l4(n4) l5(n5)
// with slots per the Q_i table.  Exact but O(N^5); the production paths below
// are measured against it.
using WeightFn = std::function<cplx(long long n, const FreqTuple&)>;
SpectralField eval_Q(MultiplierId id, const WeightFn& weight, const TwistedState& st,
                     const GaugeWeights& gw);

// sum_i Q_i(e^{itPhi} m_i) with the full (unsplit) multipliers, evaluated
// exactly through wide convolutions; equals the brute-force sum to rounding.
SpectralField q_full_sum(const NfSample& s);

// R^{(0)} = sum_i Q_i(e^{itPhi} hathat m_i) + e^{itn|n|} F(R[u]).
SpectralField eval_R0(const TwistedState& st, const SpectralField& u,
                      const GaugeWeights& gw, int sigma, double eta,
                      ProductMode mode = ProductMode::padded_transform);

struct FamiliesJ1 {
    SpectralField boundary;   // N_0^{(1)}
    SpectralField resonant;   // N_R^{(1)}
    SpectralField weight_dt;  // N_1^{(1)}
    SpectralField remainder;  // R^{(1)}
    SpectralField next;       // N^{(2)}
};
FamiliesJ1 eval_families_j1(const NfSample& s, double M);

struct FamiliesJ2 {
    SpectralField boundary;
    SpectralField resonant;
    SpectralField weight_dt;
    SpectralField remainder;
};

// The second reduction couples the inner phase to the outer one but not to
// the threshold M, so the phase-resolved inner sums can be cached per sample
// and reused across M values.
struct J2Kernels;
std::shared_ptr<const J2Kernels> make_j2_kernels(const NfSample& s, int threads = 0);
FamiliesJ2 eval_families_j2(const NfSample& s, double M,
                            std::shared_ptr<const J2Kernels> kernels = nullptr);

struct McField {
    SpectralField mean;
    std::vector<double> variance;  // per output mode, of the estimator
    long long samples = 0;
    // ell^2_s-propagated one-sigma error of the estimate
    double norm_error(double s) const;
    // ell^2_s norm with the noise bias removed (clamped at zero)
    double debiased_norm(double s) const;
};

// Monte-Carlo sweep of generation 3: the J=2 tail N^{(3)} plus the four
// J=3 families, all from one uniform sample stream over (tree, indices,
// free frequencies).
struct McGeneration3 {
    McField next_j2;  // N^{(3)} under the J=2 constraints only
    McField boundary, resonant, weight_dt, remainder;
};
McGeneration3 mc_generation3(const NfSample& s, double M, long long samples,
                             uint64_t seed, int threads = 0);
McField eval_n3_mc(const NfSample& s, double M, long long samples, uint64_t seed,
                   int threads = 0);

// Family dispatcher (J <= 2 exact; generation-3 objects only via Monte Carlo).
SpectralField eval_term(const TermDescriptor& desc, const NfSample& s);
McField eval_term_mc(const TermDescriptor& desc, const NfSample& s, long long samples,
                     uint64_t seed, int threads = 0);

struct TelescopingReport {
    int J = 1;
    double residual = 0.0;        // ell^2_s norm of LHS - RHS at the final sample
    double lhs_increment = 0.0;   // ell^2_s norm of omega(t)-omega(0)
    double quad_error_est = 0.0;  // trapezoid refinement difference
    double mc_error = 0.0;        // propagated one-sigma error of the MC tail
    std::map<std::string, double> integral_norms;
};

// Integral-form identity over the sampled trajectory:
//   omega|_0^t = sum_j N_0^{(j)}|_0^t + int sum_j (N_R^{(j)} + N_1^{(j)})
//              + int sum_j R^{(j)} + int N^{(J+1)},
// with time integrals by composite trapezoid at the native sample spacing.
TelescopingReport telescoping_check(int J, const std::vector<NfSample>& samples,
                                    double M, double s, long long mc_samples = 0,
                                    uint64_t seed = 1);

struct DecayRow {
    std::string family;
    int J = 1;
    double M = 0.0;
    double norm = 0.0;  // sup over the sampled times of the ell^2_s norm
};

struct DecayReport {
    std::vector<DecayRow> rows;
    // per family: fitted d log(norm_{J+1}/norm_J) / d log M
    std::map<std::string, double> fitted_exponent;
    std::map<std::string, double> ratio_at_mid_M;
};

DecayReport decay_scan(const std::vector<NfSample>& samples,
                       const std::vector<double>& Ms, double s);

// Smallest power of two >= 2 for which the boundary-family ratio drops
// below 1/2 on the given samples.
double choose_M(const std::vector<NfSample>& samples, double s, double M_cap = 4096.0);

}  // namespace mbo
