// Empirical verification of the fundamental quintilinear estimates: for each
// estimate family, the weighted quintilinear sum (LHS) is computed exactly on
// the window for random nonnegative inputs and compared with the product of
// norms on the RHS.  Ratios are reported per lattice size together with the
// fitted growth slope; uniformity in N is the checkable content.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbo/multipliers.hpp"

namespace mbo {

// nonnegative real sequence on the symmetric window
struct NonnegSeq {
    int n_max = 0;
    std::vector<double> v;

    NonnegSeq() = default;
    explicit NonnegSeq(int N) : n_max(N), v(static_cast<size_t>(2 * N + 1), 0.0) {}
    double at(long long n) const {
        if (n < -n_max || n > n_max) return 0.0;
        return v[static_cast<size_t>(n + n_max)];
    }
    double& ref(long long n) { return v[static_cast<size_t>(n + n_max)]; }
    double norm_l2s(double s) const;
};

enum class EstimateKind {
    matome0,
    matome1,
    matome2,
    matome3,
    fivelinear0,
    fivelinear1,
    fivelinear2,
    sixlinear0,
    sixlinear1,
    sixlinear2,
};

std::string estimate_id(EstimateKind k);
EstimateKind parse_estimate_id(const std::string& id);
std::vector<EstimateKind> all_estimate_kinds();

struct EstimateInputs {
    NonnegSeq om1, W2, om3, W4, om5;
};

struct EstimateParams {
    double s = 0.6;
    double delta = 0.025;  // defaults to (s - 1/2)/4
    double eta = 0x1p-10;
};

struct TrialResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // 0 when both sides vanish
    int worst_i = 0;     // multiplier index for the families that scan i
};

// Exact LHS/RHS for one input tuple.  Throws InvalidRegularity for s <= 1/2.
TrialResult run_estimate_trial(EstimateKind kind, const EstimateInputs& in,
                               const EstimateParams& p);

// Deterministic input ensembles: trial index cycles through iid uniform,
// Sobolev-colored, and adversarial near-boundary spikes.
EstimateInputs make_trial_inputs(int n_max, EstimateKind kind, uint64_t seed, int trial,
                                 double s);

struct EstimateSizeResult {
    int n_max = 0;
    double worst_ratio = 0.0;
    int worst_trial = 0;
    int worst_i = 0;
};

struct EstimateReport {
    std::string id;
    double s = 0.6, delta = 0.025, eta = 0x1p-10;
    uint64_t seed = 0;
    int trials = 0;
    std::vector<EstimateSizeResult> sizes;
    double slope = 0.0;  // fitted log(worst_ratio) vs log(N)
};

EstimateReport verify_estimate(EstimateKind kind, double s, double delta,
                               const std::vector<int>& sizes, int trials, uint64_t seed,
                               double eta = 0x1p-10, int threads = 0);

// Re-evaluates the stored worst trial; must reproduce worst_ratio to 1e-12.
double replay_witness(const EstimateReport& rep, size_t size_index);

}  // namespace mbo
