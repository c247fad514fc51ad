#include "mbo/multipliers.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "mbo/errors.hpp"

namespace mbo {

namespace {

inline double dd(long long x) { return static_cast<double>(x); }
inline long long labs_(long long x) { return std::llabs(x); }

double base_value(int i, long long n, const FreqTuple& t, int sigma) {
    const double sg = static_cast<double>(sigma);
    const long long n45 = t.n4 + t.n5;
    switch (i) {
        case 1:
            return (n > 0 && n45 < 0) ? -2.0 * sg * dd(n45) : 0.0;
        case 2:
            return (n > 0 && n45 < 0) ? 2.0 * sg * dd(n45) : 0.0;
        case 3:
        case 4:
        case 5: {
            if (!(n < 0 && n45 > 0)) return 0.0;
            const long long n123 = t.n1 + t.n2 + t.n3;
            assert(n123 != 0 && "n123 = n - n45 < 0 under the indicator");
            if (n123 == 0) return 0.0;
            const double r = dd(n) / dd(n123);
            if (i == 3) return 2.0 * sg * dd(n45) * (2.0 + r);
            if (i == 4) return 4.0 * sg * dd(n45) * (1.0 + r);
            return 2.0 * sg * dd(n45) * r;
        }
        case 6:
        case 7: {
            const long long n23 = t.n2 + t.n3;
            const bool ind = (i == 6) ? (n23 > 0 && n45 > 0) : (n23 < 0 && n45 < 0);
            if (!ind) return 0.0;
            const long long n2345 = n23 + n45;
            assert(n2345 != 0 && "n2345 has a strict sign under the indicator");
            if (n2345 == 0) return 0.0;
            const double c = (i == 6) ? -2.0 * sg : 2.0 * sg;
            return c * dd(n23) * dd(n45) / dd(n2345);
        }
        default:
            throw ConfigInvalid("multiplier: index out of range");
    }
}

}  // namespace

double multiplier(MultiplierId id, long long n, const FreqTuple& t, int sigma) {
    if (id.i < 1 || id.i > 7) throw ConfigInvalid("multiplier: index out of range");
    if (t.sum() != n)
        throw ConstraintViolated("multiplier: n != n1+n2+n3+n4+n5");
    if (!id.starred) return base_value(id.i, n, t, sigma);
    return base_value(id.i, -n, t.negated(), sigma);
}

bool in_A1(const FreqTuple& t, double eta) {
    const long long n = t.sum();
    const long long n15 = t.n1 + t.n5, n35 = t.n3 + t.n5;
    if (n15 * n35 == 0) return true;
    const double a24 = static_cast<double>(std::max(labs_(t.n2), labs_(t.n4)));
    if (a24 >= eta * eta * static_cast<double>(std::min(labs_(t.n5), labs_(n)))) return true;
    const bool small24 = a24 < eta * eta * static_cast<double>(labs_(t.n5));
    if (small24 && static_cast<double>(labs_(t.n5)) <
                       eta * static_cast<double>(std::min(labs_(t.n1), labs_(t.n3))) &&
        static_cast<double>(labs_(t.n2 + t.n4)) >=
            eta * static_cast<double>(labs_(t.n1 + t.n3)))
        return true;
    if (small24 && static_cast<double>(labs_(t.n3)) <
                       eta * static_cast<double>(std::min(labs_(t.n1), labs_(t.n5))) &&
        static_cast<double>(labs_(t.n2 + t.n4)) >= eta * static_cast<double>(labs_(n15)) &&
        labs_(t.n5) <= 2 * labs_(t.n1))
        return true;
    return false;
}

bool in_A2(const FreqTuple& t, double eta) {
    const long long n13 = t.n1 + t.n3, n15 = t.n1 + t.n5;
    if (n13 * n15 == 0) return true;
    return static_cast<double>(std::max(labs_(t.n2), labs_(t.n4))) >=
           eta * static_cast<double>(std::min(labs_(t.n3), labs_(t.n5)));
}

HatSplit hat_split(MultiplierId id, long long n, const FreqTuple& t, double eta, int sigma) {
    const double m = multiplier(id, n, t, sigma);
    HatSplit out;
    if (m == 0.0) return out;
    // Starred symbols test the mirrored tuple; A1 and A2 are symmetric under
    // negation, so testing the tuple itself is equivalent.
    const bool in_A = (id.i <= 5) ? in_A1(t, eta) : in_A2(t, eta);
    const long long cutoff = std::max(t.n2 * t.n2, t.n4 * t.n4);
    const long long ph = phi(n, t.n1, t.n3, t.n5);
    if (!in_A && labs_(ph) > cutoff)
        out.hat = m;
    else
        out.hathat = m;
    return out;
}

double hat_multiplier(MultiplierId id, long long n, const FreqTuple& t, double eta,
                      int sigma) {
    return hat_split(id, n, t, eta, sigma).hat;
}

bool hat_collapse_valid(int n_max, double eta) {
    return eta * static_cast<double>(n_max) < 1.0;
}

bool in_resonant_set(std::span<const long long> phis, double M) {
    const size_t J = phis.size();
    if (J == 0) return false;
    if (J == 1) return static_cast<double>(labs_(phis[0])) <= M;
    long long cum = phis[0];
    if (!(static_cast<double>(labs_(cum)) > M)) return false;
    for (size_t j = 1; j + 1 < J; ++j) {
        const long long next = cum + phis[j];
        if (!(labs_(next) > 2 * labs_(cum))) return false;
        cum = next;
    }
    return labs_(cum + phis[J - 1]) <= 2 * labs_(cum);
}

bool in_nonresonant_set(std::span<const long long> phis, double M) {
    const size_t J = phis.size();
    if (J == 0) return false;
    if (J == 1) return static_cast<double>(labs_(phis[0])) > M;
    long long cum = phis[0];
    if (!(static_cast<double>(labs_(cum)) > M)) return false;
    for (size_t j = 1; j < J; ++j) {
        const long long next = cum + phis[j];
        if (!(labs_(next) > 2 * labs_(cum))) return false;
        cum = next;
    }
    return true;
}

}  // namespace mbo
