#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "mbo/multipliers.hpp"
#include "mbo/random.hpp"

using namespace mbo;

namespace {

// independent transliteration of the harmless-region definitions, kept
// deliberately verbose; diffed against the production predicates
bool ref_in_A1(long long n1, long long n2, long long n3, long long n4, long long n5,
               double eta) {
    const long long n = n1 + n2 + n3 + n4 + n5;
    const double a2 = static_cast<double>(std::llabs(n2));
    const double a4 = static_cast<double>(std::llabs(n4));
    const double m24 = a2 > a4 ? a2 : a4;
    if ((n1 + n5) * (n3 + n5) == 0) return true;
    {
        const double lo = std::min<double>(static_cast<double>(std::llabs(n5)),
                                           static_cast<double>(std::llabs(n)));
        if (m24 >= eta * eta * lo) return true;
    }
    if (m24 < eta * eta * static_cast<double>(std::llabs(n5))) {
        const double m13 = std::min<double>(static_cast<double>(std::llabs(n1)),
                                            static_cast<double>(std::llabs(n3)));
        if (static_cast<double>(std::llabs(n5)) < eta * m13 &&
            static_cast<double>(std::llabs(n2 + n4)) >=
                eta * static_cast<double>(std::llabs(n1 + n3)))
            return true;
        const double m15 = std::min<double>(static_cast<double>(std::llabs(n1)),
                                            static_cast<double>(std::llabs(n5)));
        if (static_cast<double>(std::llabs(n3)) < eta * m15 &&
            static_cast<double>(std::llabs(n2 + n4)) >=
                eta * static_cast<double>(std::llabs(n1 + n5)) &&
            std::llabs(n5) <= 2 * std::llabs(n1))
            return true;
    }
    return false;
}

bool ref_in_A2(long long n1, long long n2, long long n3, long long n4, long long n5,
               double eta) {
    if ((n1 + n3) * (n1 + n5) == 0) return true;
    const double m24 = std::max<double>(static_cast<double>(std::llabs(n2)),
                                        static_cast<double>(std::llabs(n4)));
    const double m35 = std::min<double>(static_cast<double>(std::llabs(n3)),
                                        static_cast<double>(std::llabs(n5)));
    return m24 >= eta * m35;
}

}  // namespace

TEST_CASE("phase arithmetic") {
    CHECK(phi(2, 2, 1, -1) == 0);
    CHECK(phi(5, 5, 0, 0) == 0);
    CHECK(phi(3, 1, 1, 1) == 6);
    CHECK(phi(-2, 0, 0, -2) == 0);
}

TEST_CASE("quadratic reduction identity, positive-n normalization") {
    // For n >= 0, n1 >= 0, n5 <= 0 (and any n2, n4), with p = n1 + n3 + n5:
    //   Phi = 2 (n1+n5)(n3+n5) + n^2 - p^2   when n3 >= 0,
    //   Phi = -2 (n1+n3)(n1+n5) + n^2 + p^2  when n3 < 0.
    const int B = 30;
    long long checked = 0;
    for (long long n1 = 0; n1 <= B; ++n1)
        for (long long n3 = -B; n3 <= B; ++n3)
            for (long long n5 = -B; n5 <= 0; ++n5) {
                const long long p = n1 + n3 + n5;
                for (long long n = 0; n <= 3 * B; n += 7) {  // n24 = n - p arbitrary
                    const long long f = phi(n, n1, n3, n5);
                    const long long rhs =
                        n3 >= 0 ? 2 * (n1 + n5) * (n3 + n5) + n * n - p * p
                                : -2 * (n1 + n3) * (n1 + n5) + n * n + p * p;
                    REQUIRE(f == rhs);
                    ++checked;
                }
            }
    CHECK(checked > 500000);
}

TEST_CASE("quadratic reduction identity, positive-pair normalization") {
    // For n3 >= n5 > 0, p = n1 + n3 + n5, X = n1 - n5, Y = 2 n3 - n1 - n5:
    //   6 Phi = -(3X^2 + Y^2) + 6 n|n| - 2 p^2   when n1 >= 0,
    //   Phi = 2 (n1+n3)(n1+n5) + n|n| - p^2      when n1 < 0.
    const int B = 30;
    for (long long n1 = -B; n1 <= B; ++n1)
        for (long long n3 = 1; n3 <= B; ++n3)
            for (long long n5 = 1; n5 <= n3; ++n5) {
                const long long p = n1 + n3 + n5;
                for (long long n = -2 * B; n <= 2 * B; n += 5) {
                    const long long f = phi(n, n1, n3, n5);
                    if (n1 >= 0) {
                        const long long X = n1 - n5, Y = 2 * n3 - n1 - n5;
                        REQUIRE(6 * f ==
                                -(3 * X * X + Y * Y) + 6 * signed_square(n) - 2 * p * p);
                    } else {
                        REQUIRE(f == 2 * (n1 + n3) * (n1 + n5) + signed_square(n) - p * p);
                    }
                }
            }
}

TEST_CASE("multiplier indicators and shape bounds") {
    // m1 requires n > 0
    CHECK(multiplier({1, false}, -3, {-1, 0, -1, 0, -1}, 1) == 0.0);
    CHECK(multiplier({1, false}, 0, {1, 0, 1, 0, -2}, 1) == 0.0);

    // value checks against the closed forms, sigma folded in
    for (int sigma : {-1, 1}) {
        const FreqTuple t{5, 1, 2, -1, -3};  // n = 4 > 0, n45 = -4 < 0
        CHECK(multiplier({1, false}, 4, t, sigma) ==
              doctest::Approx(-2.0 * sigma * -4.0));
        CHECK(multiplier({2, false}, 4, t, sigma) ==
              doctest::Approx(2.0 * sigma * -4.0));
    }
    {
        const FreqTuple t{-4, 1, -3, 2, 1};  // n = -3 < 0, n45 = 3 > 0, n123 = -6
        CHECK(multiplier({3, false}, -3, t, 1) ==
              doctest::Approx(2.0 * 3.0 * (2.0 + 0.5)));
        CHECK(multiplier({4, false}, -3, t, 1) ==
              doctest::Approx(4.0 * 3.0 * (1.0 + 0.5)));
        CHECK(multiplier({5, false}, -3, t, 1) == doctest::Approx(2.0 * 3.0 * 0.5));
    }
    CHECK_THROWS_AS(multiplier({1, false}, 3, {1, 1, 1, 1, 1}, 1), ConstraintViolated);

    // dominated bound for the middle family: |m_i| <= c_i * 3 |n45|, scanned
    // exhaustively over |n_l| <= 20
    const int B = 20;
    for (long long n1 = -B; n1 <= B; ++n1)
        for (long long n2 = -B; n2 <= B; n2 += 4)
            for (long long n3 = -B; n3 <= B; ++n3)
                for (long long n4 = -B; n4 <= B; n4 += 4)
                    for (long long n5 = -B; n5 <= B; ++n5) {
                        const FreqTuple t{n1, n2, n3, n4, n5};
                        const long long n = t.sum();
                        const double n45 = static_cast<double>(std::llabs(n4 + n5));
                        REQUIRE(std::abs(multiplier({3, false}, n, t, 1)) <=
                                6.0 * n45 + 1e-12);
                        REQUIRE(std::abs(multiplier({4, false}, n, t, 1)) <=
                                8.0 * n45 + 1e-12);
                        REQUIRE(std::abs(multiplier({5, false}, n, t, 1)) <=
                                2.0 * n45 + 1e-12);
                    }
}

TEST_CASE("starred symbols are the mirrored ones") {
    Rng rng(71);
    for (int rep = 0; rep < 200; ++rep) {
        FreqTuple t{rng.uniform_int(-30, 30), rng.uniform_int(-30, 30),
                    rng.uniform_int(-30, 30), rng.uniform_int(-30, 30),
                    rng.uniform_int(-30, 30)};
        const long long n = t.sum();
        for (int i = 1; i <= 7; ++i) {
            const double starred = multiplier({i, true}, n, t, -1);
            const double mirrored = multiplier({i, false}, -n, t.negated(), -1);
            CHECK(starred == mirrored);
        }
    }
}

TEST_CASE("harmless regions against an independent transliteration") {
    const double eta = 0x1p-10;
    // trivial branches
    CHECK(in_A1({4, 2, 3, 1, -4}, eta));   // n15 = 0
    CHECK(in_A2({-3, 9, 3, 2, 7}, eta));   // n13 = 0
    CHECK(in_A2({1, 5, 2, 0, 9}, eta));    // |n2| v |n4| >= eta(min)

    Rng rng(73);
    int disagreements = 0;
    for (int rep = 0; rep < 4000; ++rep) {
        // mixed scales so every branch gets exercised, including eta-edges
        const long long scale = rep % 2 == 0 ? 8 : 2000;
        FreqTuple t{rng.uniform_int(-scale, scale), rng.uniform_int(-2, 2),
                    rng.uniform_int(-scale, scale), rng.uniform_int(-2, 2),
                    rng.uniform_int(-scale, scale)};
        for (double e : {0x1p-10, 0.1, 0.5}) {
            if (in_A1(t, e) != ref_in_A1(t.n1, t.n2, t.n3, t.n4, t.n5, e))
                ++disagreements;
            if (in_A2(t, e) != ref_in_A2(t.n1, t.n2, t.n3, t.n4, t.n5, e))
                ++disagreements;
        }
    }
    CHECK(disagreements == 0);
}

TEST_CASE("hat + hathat partitions each multiplier exactly") {
    const double eta = 0x1p-10;
    const int B = 12;
    for (long long n1 = -B; n1 <= B; ++n1)
        for (long long n2 = -B; n2 <= B; ++n2)
            for (long long n3 = -B; n3 <= B; ++n3)
                for (long long n4 = -B; n4 <= B; n4 += 3)
                    for (long long n5 = -B; n5 <= B; n5 += 3) {
                        const FreqTuple t{n1, n2, n3, n4, n5};
                        const long long n = t.sum();
                        for (int i = 1; i <= 7; ++i) {
                            const double m = multiplier({i, false}, n, t, -1);
                            const auto hs = hat_split({i, false}, n, t, eta, -1);
                            REQUIRE(hs.hat + hs.hathat == m);
                            REQUIRE((hs.hat == 0.0 || hs.hathat == 0.0));
                        }
                    }
}

TEST_CASE("resonance sets partition level by level") {
    const double M = 16.0;
    auto nr1 = [&](long long m1) { return std::llabs(m1) > M; };
    // J=1 -> 2, exhaustive on |mu| <= 100
    for (long long m1 = -100; m1 <= 100; ++m1) {
        for (long long m2 = -100; m2 <= 100; ++m2) {
            const std::vector<long long> chain{m1, m2};
            const bool r = in_resonant_set(chain, M);
            const bool nr = in_nonresonant_set(chain, M);
            if (nr1(m1)) {
                REQUIRE(r != nr);  // exactly one
            } else {
                REQUIRE(!r);
                REQUIRE(!nr);
            }
        }
    }
    // J=2 -> 3, exhaustive on |mu| <= 100
    for (long long m1 = -100; m1 <= 100; ++m1) {
        if (!nr1(m1)) continue;
        for (long long m2 = -100; m2 <= 100; ++m2) {
            const bool parent_nr = in_nonresonant_set(std::vector<long long>{m1, m2}, M);
            for (long long m3 = -100; m3 <= 100; ++m3) {
                const std::vector<long long> chain{m1, m2, m3};
                const bool r = in_resonant_set(chain, M);
                const bool nr = in_nonresonant_set(chain, M);
                if (parent_nr) {
                    REQUIRE(r != nr);
                } else {
                    REQUIRE(!r);
                    REQUIRE(!nr);
                }
            }
        }
    }
    // J=3 -> 4, exhaustive on a smaller grid plus random spot checks at 100
    for (long long m1 = -24; m1 <= 24; ++m1)
        for (long long m2 = -24; m2 <= 24; ++m2)
            for (long long m3 = -24; m3 <= 24; ++m3) {
                const bool parent_nr =
                    in_nonresonant_set(std::vector<long long>{m1, m2, m3}, 4.0);
                for (long long m4 = -24; m4 <= 24; m4 += 3) {
                    const std::vector<long long> chain{m1, m2, m3, m4};
                    const bool r = in_resonant_set(chain, 4.0);
                    const bool nr = in_nonresonant_set(chain, 4.0);
                    if (parent_nr) {
                        REQUIRE(r != nr);
                    } else {
                        REQUIRE(!r);
                        REQUIRE(!nr);
                    }
                }
            }
    Rng rng(79);
    for (int rep = 0; rep < 200000; ++rep) {
        std::vector<long long> chain{rng.uniform_int(-100, 100),
                                     rng.uniform_int(-100, 100),
                                     rng.uniform_int(-100, 100),
                                     rng.uniform_int(-100, 100)};
        const bool parent_nr = in_nonresonant_set(
            std::vector<long long>{chain[0], chain[1], chain[2]}, M);
        const bool r = in_resonant_set(chain, M);
        const bool nr = in_nonresonant_set(chain, M);
        if (parent_nr)
            REQUIRE(r != nr);
        else
            REQUIRE((!r && !nr));
    }
}

TEST_CASE("phase-product bounds on sampled chains") {
    // on the resonant set: |Phi~_j| doubles and the cumulative products
    // dominate the half-power weights with C = 2
    const double M = 8.0;
    Rng rng(83);
    auto jp = [](long long x) {
        return std::sqrt(1.0 + static_cast<double>(x) * static_cast<double>(x));
    };
    int res_seen = 0, nonres_seen = 0;
    for (int rep = 0; rep < 2000000 && (res_seen < 500 || nonres_seen < 500); ++rep) {
        const int J = 3;
        std::vector<long long> mu(J);
        for (auto& m : mu) m = rng.uniform_int(-600, 600);
        std::vector<long long> cum(J);
        long long acc = 0;
        for (int j = 0; j < J; ++j) cum[static_cast<size_t>(j)] = (acc += mu[static_cast<size_t>(j)]);

        if (in_resonant_set(mu, M)) {
            ++res_seen;
            double lhs = 1.0, rhs = 1.0;
            for (int j = 0; j < J - 1; ++j) {
                lhs *= std::abs(static_cast<double>(cum[static_cast<size_t>(j)]));
                REQUIRE(std::llabs(cum[static_cast<size_t>(j)]) >
                        std::pow(2.0, j) * M / 2.0);
                // |Phi_j| ~ |Phi~_j| for j <= J-1
                if (j >= 1)
                    REQUIRE(std::llabs(mu[static_cast<size_t>(j)]) * 2 >=
                            std::llabs(cum[static_cast<size_t>(j)]));
            }
            for (int j = 0; j < J - 2; ++j) rhs *= std::sqrt(std::pow(2.0, j) * M);
            for (int j = 0; j < J; ++j) rhs *= std::sqrt(jp(mu[static_cast<size_t>(j)]));
            REQUIRE(lhs * std::pow(2.0, J) >= rhs);
        }
        if (in_nonresonant_set(mu, M)) {
            ++nonres_seen;
            double lhs = 1.0, rhs = 1.0;
            for (int j = 0; j < J; ++j)
                lhs *= std::abs(static_cast<double>(cum[static_cast<size_t>(j)]));
            for (int j = 0; j < J; ++j)
                rhs *= std::sqrt(std::pow(2.0, j) * M) * std::sqrt(jp(mu[static_cast<size_t>(j)]));
            REQUIRE(lhs * std::pow(2.0, J) >= rhs);
        }
    }
    CHECK(res_seen >= 500);
    CHECK(nonres_seen >= 500);
}
