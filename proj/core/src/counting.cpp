#include "mbo/counting.hpp"

#include <algorithm>
#include <cmath>

#include "mbo/errors.hpp"
#include "mbo/random.hpp"

namespace mbo {

namespace {

// exact integer square root; returns -1 when x is not a perfect square
long long perfect_sqrt(long long x) {
    if (x < 0) return -1;
    const auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(x))));
    for (long long c = std::max(0LL, r - 2); c <= r + 2; ++c)
        if (c * c == x) return c;
    return -1;
}

}  // namespace

long long count_ellipse(long long c1, long long c2, long long mu, long long R) {
    if (R <= 1) throw ConfigInvalid("count_ellipse: R must exceed 1");
    long long count = 0;
    for (long long x = -R; x <= R; ++x) {
        const long long d = x - c1;
        const long long rem = mu - 3 * d * d;
        if (rem < 0) continue;
        const long long r = perfect_sqrt(rem);
        if (r < 0) continue;
        for (const long long y : {c2 + r, c2 - r}) {
            if (std::llabs(x) + std::llabs(y) > R) continue;
            ++count;
            if (r == 0) break;  // avoid double-counting y = c2
        }
    }
    return count;
}

long long count_hyperbola(long long c1, long long c2, long long mu, long long R) {
    if (R <= 1) throw ConfigInvalid("count_hyperbola: R must exceed 1");
    if (mu == 0) throw ZeroMu("count_hyperbola: mu must be nonzero");
    long long count = 0;
    for (long long x = -R; x <= R; ++x) {
        const long long d = x - c1;
        if (d == 0 || mu % d != 0) continue;
        const long long y = c2 + mu / d;
        if (std::llabs(x) + std::llabs(y) <= R) ++count;
    }
    return count;
}

CountReport counting_scan(Curve curve, long long R_max,
                          const std::vector<std::pair<long long, long long>>& centers,
                          MuStrategy strategy, uint64_t seed, int threads) {
    (void)threads;
    CountReport rep;
    rep.curve = curve;
    for (long long R = 2; R <= R_max; R *= 2) {
        long long best = 0, best_mu = 0, best_c1 = 0, best_c2 = 0;
        for (const auto& [c1, c2] : centers) {
            if (strategy == MuStrategy::all) {
                // one pass over the ball, bin by mu, longest run after sorting
                std::vector<long long> mus;
                mus.reserve(static_cast<size_t>(2 * R * R + 4 * R + 2));
                for (long long x = -R; x <= R; ++x) {
                    const long long ybound = R - std::llabs(x);
                    for (long long y = -ybound; y <= ybound; ++y) {
                        const long long dx = x - c1, dy = y - c2;
                        const long long mu =
                            curve == Curve::ellipse ? 3 * dx * dx + dy * dy : dx * dy;
                        if (curve == Curve::hyperbola && mu == 0) continue;
                        mus.push_back(mu);
                    }
                }
                std::sort(mus.begin(), mus.end());
                size_t k = 0;
                while (k < mus.size()) {
                    size_t j = k;
                    while (j < mus.size() && mus[j] == mus[k]) ++j;
                    if (static_cast<long long>(j - k) > best) {
                        best = static_cast<long long>(j - k);
                        best_mu = mus[k];
                        best_c1 = c1;
                        best_c2 = c2;
                    }
                    k = j;
                }
            } else {
                Rng rng(seed, static_cast<uint64_t>(R));
                const long long mu_cap =
                    curve == Curve::ellipse ? 4 * R * R : R * R / 4 + 1;
                for (int probe = 0; probe < 256; ++probe) {
                    const long long mu = rng.uniform_int(1, mu_cap);
                    const long long c = curve == Curve::ellipse
                                            ? count_ellipse(c1, c2, mu, R)
                                            : count_hyperbola(c1, c2, mu, R);
                    if (c > best) {
                        best = c;
                        best_mu = mu;
                        best_c1 = c1;
                        best_c2 = c2;
                    }
                }
            }
        }
        rep.R_values.push_back(R);
        rep.max_counts.push_back(best);
        rep.witness_mu.push_back(best_mu);
        rep.witness_c1.push_back(best_c1);
        rep.witness_c2.push_back(best_c2);
    }
    // least-squares slope in log-log
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t k = 0; k < rep.R_values.size(); ++k) {
        if (rep.max_counts[k] <= 0) continue;
        const double x = std::log(static_cast<double>(rep.R_values[k]));
        const double y = std::log(static_cast<double>(rep.max_counts[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return rep;
}

namespace {

// Region normalization shared by the direct and conic routes; the
// nondegeneracy constraints keep the reduced conics out of their split
// (line) cases, which is what makes the counts divisor-bounded.
bool fact_region_ok(WhichFact which, long long n1, long long n3, long long n5) {
    if (which == WhichFact::fact1)
        return n1 > 0 && n5 < 0 && n1 + n3 > 0 && n1 + n5 != 0 && n3 + n5 != 0;
    return n3 >= n5 && n5 > 0 && n1 + n3 != 0 && n1 + n5 != 0;
}

}  // namespace

long long fact_count(WhichFact which, long long n, long long n2, long long n4,
                     long long phi_target, const IntervalSpec& box) {
    const long long p = n - n2 - n4;
    long long count = 0;
    for (long long a = box.lo_a; a <= box.hi_a; ++a) {
        for (long long b = box.lo_b; b <= box.hi_b; ++b) {
            long long trip[3];
            trip[box.var_a] = a;
            trip[box.var_b] = b;
            const int free_var = 3 - box.var_a - box.var_b;
            trip[free_var] = p - a - b;
            if (!fact_region_ok(which, trip[0], trip[1], trip[2])) continue;
            if (phi(n, trip[0], trip[1], trip[2]) == phi_target) ++count;
        }
    }
    return count;
}

namespace {

// integer roots of A u^2 + B u + C = 0 appended to `roots`; `all_of_range`
// set when the equation is identically zero
void integer_roots(long long A, long long B, long long C, std::vector<long long>& roots,
                   bool& identically_zero) {
    identically_zero = false;
    if (A == 0) {
        if (B == 0) {
            identically_zero = C == 0;
            return;
        }
        if (C % B == 0) roots.push_back(-C / B);
        return;
    }
    const __int128 disc = static_cast<__int128>(B) * B - 4 * static_cast<__int128>(A) * C;
    if (disc < 0) return;
    const auto d = static_cast<long long>(std::llround(
        std::sqrt(static_cast<double>(static_cast<long double>(disc)))));
    long long r = -1;
    for (long long c = std::max(0LL, d - 2); c <= d + 2; ++c)
        if (static_cast<__int128>(c) * c == disc) {
            r = c;
            break;
        }
    if (r < 0) return;
    for (const long long num : {-B + r, -B - r}) {
        if (num % (2 * A) == 0) roots.push_back(num / (2 * A));
        if (r == 0) break;
    }
}

}  // namespace

long long fact_count_via_conic(WhichFact which, long long n, long long n2, long long n4,
                               long long phi_target, const IntervalSpec& box) {
    // For fixed first restricted variable, the phase condition becomes a
    // sign-piecewise quadratic in the second one (the conic slice); solve it
    // exactly instead of scanning.
    const long long p = n - n2 - n4;
    const long long sn = signed_square(n);
    long long count = 0;
    for (long long a = box.lo_a; a <= box.hi_a; ++a) {
        const long long q = p - a;  // var_b + free_var = q
        const int free_var = 3 - box.var_a - box.var_b;
        // signs of (var_b, free_var) pieces: s in {+1 (x >= 0), -1 (x < 0)}
        for (int sb = -1; sb <= 1; sb += 2) {
            for (int sf = -1; sf <= 1; sf += 2) {
                // Phi = sn - sum s(trip_j); with trip[var_a] = a fixed:
                //   s(var_b) = sb u^2, s(free) = sf (q-u)^2
                // equation: sn - s(a-term) - sb u^2 - sf (q-u)^2 = phi_target
                const long long sa = signed_square(a);
                const long long K = sn - sa - phi_target;
                // sb u^2 + sf (q - u)^2 = K
                const long long A = sb + sf;
                const long long B = -2 * sf * q;
                const long long C = sf * q * q - K;
                std::vector<long long> roots;
                bool all = false;
                integer_roots(A, B, C, roots, all);
                auto admit = [&](long long u) {
                    const long long w = q - u;
                    if ((sb > 0) != (u >= 0)) return false;
                    if ((sf > 0) != (w >= 0)) return false;
                    if (u < box.lo_b || u > box.hi_b) return false;
                    long long trip[3];
                    trip[box.var_a] = a;
                    trip[box.var_b] = u;
                    trip[free_var] = w;
                    return fact_region_ok(which, trip[0], trip[1], trip[2]);
                };
                if (all) {
                    for (long long u = box.lo_b; u <= box.hi_b; ++u)
                        if (admit(u)) ++count;
                } else {
                    std::sort(roots.begin(), roots.end());
                    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
                    for (long long u : roots)
                        if (admit(u)) ++count;
                }
            }
        }
    }
    return count;
}

}  // namespace mbo
