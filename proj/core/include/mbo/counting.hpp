// Lattice point counting on translated conics inside l1 balls: ellipses
// 3x^2 + y^2 = mu and hyperbolas xy = mu, the divisor-bound scans over R,
// and the derived counts of (n1, n3, n5) triples at fixed frequency sum and
// phase.  All counts are exact integer enumerations.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbo/multipliers.hpp"

namespace mbo {

enum class Curve { ellipse, hyperbola };

// #{(x, y) : 3(x-c1)^2 + (y-c2)^2 = mu, |x|+|y| <= R}
long long count_ellipse(long long c1, long long c2, long long mu, long long R);

// #{(x, y) : (x-c1)(y-c2) = mu != 0, |x|+|y| <= R}; throws ZeroMu for mu = 0.
long long count_hyperbola(long long c1, long long c2, long long mu, long long R);

enum class MuStrategy { all, random_sample };

struct CountReport {
    Curve curve = Curve::hyperbola;
    std::vector<long long> R_values;
    std::vector<long long> max_counts;   // max over centers and mu
    std::vector<long long> witness_mu;   // arg max
    std::vector<long long> witness_c1, witness_c2;
    double slope = 0.0;  // fitted log(max_count) vs log(R)
};

// Max count over the sampled centers and, for MuStrategy::all, every mu
// attained by a lattice point of the ball (binning one pass over the ball);
// random_sample draws mu values instead.
CountReport counting_scan(Curve curve, long long R_max,
                          const std::vector<std::pair<long long, long long>>& centers,
                          MuStrategy strategy = MuStrategy::all, uint64_t seed = 1,
                          int threads = 0);

enum class WhichFact { fact1, fact2 };

struct IntervalSpec {
    // which two of (n1, n3, n5) are restricted, and their inclusive ranges
    int var_a = 0;  // 0, 1, 2 for n1, n3, n5
    int var_b = 2;
    long long lo_a = 0, hi_a = 0, lo_b = 0, hi_b = 0;
};

// #{(n1, n3, n5)} with n1+n3+n5 = n - n2 - n4, Phi = phi_target, two of the
// variables confined to the given intervals; exhaustive over the intervals.
// fact1 additionally imposes n > 0, n45 < 0 sign normalization of its source
// region and fact2 imposes n3 >= n5 > 0; `which` only tags the report.
long long fact_count(WhichFact which, long long n, long long n2, long long n4,
                     long long phi_target, const IntervalSpec& box);

// The same count routed through the conic reduction: for fixed (n, n2, n4,
// Phi) the triples lie on a hyperbola or ellipse in transformed coordinates;
// used as the cross-check oracle.
long long fact_count_via_conic(WhichFact which, long long n, long long n2, long long n4,
                               long long phi_target, const IntervalSpec& box);

}  // namespace mbo
