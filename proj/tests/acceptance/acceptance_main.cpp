// Acceptance suite: each criterion prints one [PASS]/[FAIL] line (plus
// supporting numbers) and the process exits nonzero if any selected
// criterion fails.  Run `acceptance --criterion <1..10>` or `--all`.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "mbo/counting.hpp"
#include "mbo/estimates.hpp"
#include "mbo/gauge.hpp"
#include "mbo/normal_form.hpp"
#include "mbo/parallel.hpp"
#include "mbo/random.hpp"
#include "mbo/solver.hpp"

using namespace mbo;

namespace {

int failures = 0;

void report(int crit, bool pass, const std::string& text) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", crit, text.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

SpectralField two_mode(int N, double a, double b) {
    SpectralField u(N, true);
    u.at(1) = u.at(-1) = cplx{0.5 * a, 0.0};
    u.at(2) = u.at(-2) = cplx{0.5 * b, 0.0};
    return u;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. operator identities
// ---------------------------------------------------------------------------
void criterion1() {
    const int N = 64;
    Rng rng(20240601);
    double worst_hh = 0.0, worst_prim = 0.0, worst_part = 0.0, worst_conj = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto f = random_complex_field(N, rng);
        auto target = project(f, Projection::non_mean);
        target *= cplx{-1.0, 0.0};
        worst_hh = std::max(worst_hh, (hilbert(hilbert(f)) - target).max_abs());
        worst_prim = std::max(
            worst_prim, (inv_dx(dx(f)) - project(f, Projection::non_mean)).max_abs());
        const auto sum = project(f, Projection::plus) + project(f, Projection::minus) +
                         project(f, Projection::mean);
        worst_part = std::max(worst_part, (sum - f).max_abs());

        const auto r = random_real_field(N, rng);
        worst_conj = std::max(worst_conj, hilbert(r).conj_symmetry_defect());
        worst_conj = std::max(worst_conj, product(r, r).conj_symmetry_defect());
        worst_conj = std::max(worst_conj, inv_dx(dx(r)).conj_symmetry_defect());
    }
    const bool pass = worst_hh < 1e-12 && worst_prim < 1e-12 && worst_part < 1e-12 &&
                      worst_conj < 1e-12;
    report(1, pass,
           fmt("operator identities at N=64, 100 fields: H^2 %.2e, primitive %.2e, "
               "partition %.2e, conj-symmetry %.2e (all < 1e-12)",
               worst_hh, worst_prim, worst_part, worst_conj));
}

// ---------------------------------------------------------------------------
// 2. solver conservation
// ---------------------------------------------------------------------------
void criterion2() {
    const auto u0 = two_mode(64, 0.5, 0.25);
    StepConfig c;
    c.dt = 1e-4;
    c.sigma = -1;
    c.equation = Equation::mbo;  // the triple is a first integral of this form
    const auto traj = integrate(u0, 1.0, c, 100);
    const auto a = conserved(traj.states.front(), c.sigma);
    double worst_mass = 0.0, worst_energy = 0.0;
    bool mean_exact = true;
    for (size_t k = 0; k < traj.samples(); ++k) {
        const auto cc = conserved(traj.states[k], c.sigma);
        mean_exact = mean_exact && (cc.mean == a.mean);
        worst_mass = std::max(worst_mass, std::abs(cc.mass_l2 - a.mass_l2));
        worst_energy = std::max(worst_energy, std::abs(cc.energy - a.energy));
    }
    const double rel_mass = worst_mass / std::abs(a.mass_l2);
    const double rel_energy = worst_energy / std::abs(a.energy);

    // fourth-order confirmation over a shorter horizon
    auto run_final = [&](double dt) {
        StepConfig cc = c;
        cc.dt = dt;
        return integrate(u0, 0.1, cc, 1 << 20).states.back();
    };
    const auto ref = run_final(1.25e-4);
    const double e1 = (run_final(2e-3) - ref).l2();
    const double e2 = (run_final(1e-3) - ref).l2();
    const double ratio = e1 / e2;

    const bool pass = mean_exact && rel_mass < 1e-8 && rel_energy < 1e-8 &&
                      ratio > 14.0 && ratio < 18.0;
    report(2, pass,
           fmt("conservation over T=1 (N=64, dt=1e-4): mean %s, mass drift %.2e, "
               "energy drift %.2e (< 1e-8); step order ratio %.2f in 16 +- 2",
               mean_exact ? "bitwise constant" : "DRIFTED", rel_mass, rel_energy,
               ratio));
}

// ---------------------------------------------------------------------------
// 3. gauge residual on the transported trajectory
// ---------------------------------------------------------------------------
double gauge_residual(const Trajectory& traj, double s, size_t stride) {
    double worst = 0.0;
    const double dt = traj.times[1] - traj.times[0];
    for (size_t k = std::max<size_t>(stride, 1); k + 1 < traj.samples(); k += stride) {
        const auto gm = gauge_transform(traj.states[k - 1], traj.sigma);
        const auto g0 = gauge_transform(traj.states[k], traj.sigma);
        const auto gp = gauge_transform(traj.states[k + 1], traj.sigma);
        SpectralField dv = gp.v - gm.v;
        dv *= cplx{1.0 / (2.0 * dt), 0.0};
        const auto lhs = dv + hilbert(dx2(g0.v));
        const auto rhs = rhs_v(traj.states[k], g0.v, g0.nu, traj.sigma);
        worst = std::max(worst, sobolev_norm(lhs - rhs, s - 1.0));
    }
    return worst;
}

Trajectory standard_prime_trajectory(double dt, double T) {
    StepConfig c;
    c.dt = dt;
    c.sigma = -1;
    c.equation = Equation::mbo;
    return mbo_to_mbo_prime(integrate(two_mode(64, 0.5, 0.25), T, c, 1));
}

void criterion3() {
    const double s = 0.6;
    const auto fine = standard_prime_trajectory(1e-4, 1.0);
    const double r_fine = gauge_residual(fine, s, fine.samples() / 16);

    const auto t1 = standard_prime_trajectory(1e-4, 0.02);
    const auto t2 = standard_prime_trajectory(2e-4, 0.02);
    const auto t4 = standard_prime_trajectory(4e-4, 0.02);
    const double r1 = gauge_residual(t1, s, 4), r2 = gauge_residual(t2, s, 2),
                 r4 = gauge_residual(t4, s, 1);
    const double rate21 = r2 / r1, rate42 = r4 / r2;
    const bool pass = r_fine < 1e-6 && rate21 > 2.5 && rate21 < 6.0 && rate42 > 2.5 &&
                      rate42 < 6.0;
    report(3, pass,
           fmt("transformed-equation residual (s=0.6): %.3e at dt=1e-4 (< 1e-6); "
               "refinement ratios %.2f, %.2f (second order)",
               r_fine, rate42, rate21));
}

// ---------------------------------------------------------------------------
// 4. weight identity
// ---------------------------------------------------------------------------
void criterion4() {
    const double s = 0.6;
    const auto traj = standard_prime_trajectory(1e-4, 0.02);
    const auto coarse = standard_prime_trajectory(2e-4, 0.02);
    bool pass = true;
    std::string detail;
    for (int k : {1, -1, 3, -3}) {
        auto resid = [&](const Trajectory& tr, size_t j) {
            const double dt = tr.times[1] - tr.times[0];
            const auto wm = gauge_exp(tr.states[j - 1], k, tr.sigma);
            const auto wp = gauge_exp(tr.states[j + 1], k, tr.sigma);
            SpectralField dw = wp - wm;
            dw *= cplx{1.0 / (2.0 * dt), 0.0};
            return sobolev_norm(dw - dt_gauge_exp(tr.states[j], k, tr.sigma), s - 1.0);
        };
        const double r1 = resid(traj, traj.samples() / 2);
        const double r2 = resid(coarse, coarse.samples() / 2);
        const double rate = r2 / r1;
        pass = pass && rate > 2.5 && rate < 6.0;
        detail += fmt("k=%+d: %.2e rate %.2f  ", k, r1, rate);
    }
    report(4, pass, "weight identity second-order: " + detail);
}

// ---------------------------------------------------------------------------
// 5. telescoping
// ---------------------------------------------------------------------------
std::vector<NfSample> nf_samples(const Trajectory& traj, double eta) {
    std::vector<NfSample> out;
    out.reserve(traj.samples());
    for (size_t k = 0; k < traj.samples(); ++k)
        out.push_back(make_nf_sample(traj.times[k], traj.states[k], traj.sigma, eta));
    return out;
}

void criterion5() {
    const double s = 0.6, M = 64.0, eta = 0x1p-10;
    const auto u0 = two_mode(12, 0.1, 0.05);

    auto resid = [&](double dt) {
        StepConfig c;
        c.dt = dt;
        c.sigma = -1;
        const auto traj = integrate(u0, 0.02, c, 1);
        return telescoping_check(1, nf_samples(traj, eta), M, s);
    };
    const auto r1 = resid(1e-4);
    const auto r2 = resid(2e-4);
    const auto r4 = resid(4e-4);
    const double rate21 = r2.residual / r1.residual;
    const double rate42 = r4.residual / r2.residual;
    const bool pass_j1 = r1.residual < 1e-5 && rate21 > 2.5 && rate21 < 6.0 &&
                         rate42 > 2.5 && rate42 < 6.0;
    report(5, pass_j1,
           fmt("generation-1 telescoping at N=12, M=64: residual %.3e at dt=1e-4 "
               "(< 1e-5, increment scale %.3e), refinement ratios %.2f, %.2f",
               r1.residual, r1.lhs_increment, rate42, rate21));

    // generation 2: the standalone second-generation object versus its
    // decomposition into families plus the Monte-Carlo tail
    StepConfig c;
    c.dt = 1e-3;
    c.sigma = -1;
    const auto traj = integrate(two_mode(12, 0.5, 0.25), 0.02, c, 1);
    const auto samples = nf_samples(traj, eta);
    const size_t K = samples.size();
    const int N = 12;
    std::vector<double> times(K);
    std::vector<SpectralField> lhs_t(K, SpectralField(N)), rhs_t(K, SpectralField(N)),
        tail_t(K, SpectralField(N));
    SpectralField bnd_first(N), bnd_last(N);
    double mc_var = 0.0;
    for (size_t k = 0; k < K; ++k) {
        times[k] = samples[k].t;
        const auto F1 = eval_families_j1(samples[k], M);
        lhs_t[k] = F1.next;
        const auto F2 = eval_families_j2(samples[k], M);
        rhs_t[k] = F2.resonant + F2.weight_dt + F2.remainder;
        const auto mc =
            eval_n3_mc(samples[k], M, 400000, 777 + static_cast<uint64_t>(k));
        tail_t[k] = mc.mean;
        const double sd = mc.norm_error(s);
        mc_var += sd * sd;
        if (k == 0) bnd_first = F2.boundary;
        if (k + 1 == K) bnd_last = F2.boundary;
    }
    auto trapz = [&](const std::vector<SpectralField>& v) {
        SpectralField acc(N);
        for (size_t k = 0; k + 1 < K; ++k) {
            auto mid = v[k] + v[k + 1];
            mid *= cplx{0.5 * (times[k + 1] - times[k]), 0.0};
            acc += mid;
        }
        return acc;
    };
    SpectralField delta =
        trapz(lhs_t) - (bnd_last - bnd_first) - trapz(rhs_t) - trapz(tail_t);
    const double dtt = times[1] - times[0];
    const double mc_err = std::sqrt(mc_var) * dtt;
    const double mismatch = sobolev_norm(delta, s);
    const double scale = sobolev_norm(trapz(lhs_t), s);
    const bool pass_j2 =
        scale > 0.0 && mismatch < 3.0 * mc_err + 1e-3 * std::max(scale, 1e-12);
    report(5, pass_j2,
           fmt("generation-2 cross-decomposition at N=12: mismatch %.3e vs 3 x MC "
               "error %.3e (+0.1%% quadrature floor), object scale %.3e",
               mismatch, 3.0 * mc_err, scale));
}

// ---------------------------------------------------------------------------
// 6. per-generation decay in M
// ---------------------------------------------------------------------------
void criterion6() {
    // The M in {64,128,256} shells need interaction mass at phases of that
    // size, which the (super-exponentially decaying) two-mode spectrum cannot
    // supply, so the scan runs on the other reference ensemble: seeded
    // colored data with <n>^{-2} coefficients at N = 32.
    Rng rng(20240607);
    const auto u0 = random_real_field(32, rng, 2.0, 0.6);
    StepConfig c;
    c.dt = 5e-4;
    c.sigma = -1;
    const auto traj = integrate(u0, 0.02, c, 20);
    std::vector<NfSample> samples;
    for (size_t k = 1; k < traj.samples(); ++k)
        samples.push_back(make_nf_sample(traj.times[k], traj.states[k], -1, 0x1p-10));
    const auto rep = decay_scan(samples, {64.0, 128.0, 256.0}, 0.6);
    bool pass = true;
    bool all_contracting = true;
    std::string detail;
    for (const auto* fam : {"N0", "NR", "N1", "R"}) {
        const double ex = rep.fitted_exponent.at(fam);
        pass = pass && ex > -0.6 && ex < -0.4;
        all_contracting = all_contracting && rep.ratio_at_mid_M.at(fam) < 1.0;
        detail += fmt("%s: %.3f (ratio %.2e)  ", fam, ex, rep.ratio_at_mid_M.at(fam));
    }
    report(6, pass,
           "per-generation ratio exponents vs M (target -0.5 +- 0.1): " + detail +
               (all_contracting ? "| all ratios < 1: geometric decay holds with margin"
                                : "| NON-CONTRACTING RATIO PRESENT"));
}

// ---------------------------------------------------------------------------
// 7. estimate campaigns
// ---------------------------------------------------------------------------
void criterion7() {
    const double s = 0.6, delta = (s - 0.5) / 4.0;
    const std::vector<int> sizes{16, 32, 64};
    bool pass = true;
    std::string detail;
    for (auto kind : all_estimate_kinds()) {
        const auto rep = verify_estimate(kind, s, delta, sizes, 200, 271828, 0x1p-10,
                                         default_thread_count());
        bool witness_ok = true;
        for (size_t k = 0; k < rep.sizes.size(); ++k) {
            const double replayed = replay_witness(rep, k);
            witness_ok = witness_ok && std::abs(replayed - rep.sizes[k].worst_ratio) <=
                                           1e-12 * std::max(1.0, rep.sizes[k].worst_ratio);
        }
        const bool ok = rep.slope < 0.35 && witness_ok;
        pass = pass && ok;
        detail += fmt("%s: %.3f%s  ", rep.id.c_str(), rep.slope,
                      witness_ok ? "" : " WITNESS-MISMATCH");
    }
    report(7, pass, "worst-ratio growth slopes over N in {16,32,64} (< 0.35): " + detail);
}

// ---------------------------------------------------------------------------
// 8. counting
// ---------------------------------------------------------------------------
void criterion8() {
    const bool pass_ref = count_hyperbola(0, 0, 12, 10) == 8;
    report(8, pass_ref,
           fmt("hyperbola count mu=12, R=10: %lld (expected 8)",
               count_hyperbola(0, 0, 12, 10)));

    const std::vector<std::pair<long long, long long>> centers{
        {0, 0}, {3, -5}, {-17, 11}, {101, 0}, {0, -257}};
    for (auto curve : {Curve::hyperbola, Curve::ellipse}) {
        const auto rep = counting_scan(curve, 1 << 12, centers);
        std::string rows;
        for (size_t k = 0; k < rep.R_values.size(); ++k)
            rows += fmt("%lld:%lld ", rep.R_values[k], rep.max_counts[k]);
        report(8, rep.slope < 0.35,
               fmt("%s max-count slope up to R=4096: %.3f (< 0.35); counts: %s",
                   curve == Curve::hyperbola ? "hyperbola" : "ellipse", rep.slope,
                   rows.c_str()));
    }

    Rng rng(31415);
    bool pass_large = true;
    for (int rep = 0; rep < 1000; ++rep) {
        const long long R = rng.uniform_int(2, 12);
        long long mu = R * R * R * R * R * R + 1 + rng.uniform_int(0, 1 << 20);
        if (rep % 2 == 0) mu = -mu;
        if (count_hyperbola(rng.uniform_int(-3, 3), rng.uniform_int(-3, 3), mu, R) > 2)
            pass_large = false;
    }
    report(8, pass_large, "1000 large-mu probes (|mu| > R^6): count <= 2 everywhere");
}

// ---------------------------------------------------------------------------
// 9. emptiness of the excluded corner of the case analysis
// ---------------------------------------------------------------------------
void criterion9() {
    const double eta = 0x1p-10;
    const long long B = 200;
    // Off the n2 = n4 = 0 slice every tuple lies in the harmless region:
    // |n2| v |n4| >= 1 > eta^2 * 200 >= eta^2 (|n5| ^ |n|), so the joint
    // hypotheses (which require the complement) can only hold on the slice.
    // Asserted numerically on random off-slice tuples, then the slice is
    // scanned exhaustively.
    bool off_slice_ok = eta * eta * static_cast<double>(B) < 1.0;
    Rng rng(999);
    for (int rep = 0; rep < 2000; ++rep) {
        FreqTuple t{rng.uniform_int(-B, B), rng.uniform_int(-B, B),
                    rng.uniform_int(-B, B), rng.uniform_int(-B, B),
                    rng.uniform_int(-B, B)};
        if (std::max(std::llabs(t.n2), std::llabs(t.n4)) >= 1 && !in_A1(t, eta))
            off_slice_ok = false;
    }
    long long hits = 0;
    for (long long n1 = -B; n1 <= B; ++n1)
        for (long long n3 = -B; n3 <= B; ++n3)
            for (long long n5 = -B; n5 <= B; ++n5) {
                const FreqTuple t{n1, 0, n3, 0, n5};
                const long long n = n1 + n3 + n5;
                if (!(n > 0) || !(n5 < 0)) continue;            // signs (n45 = n5)
                if (std::llabs(n1) < std::llabs(n3)) continue;  // |n1| >= |n3|
                const double nmax = static_cast<double>(
                    std::max({std::llabs(n1), std::llabs(n3), std::llabs(n5)}));
                if (!(static_cast<double>(std::llabs(n)) < eta * eta * nmax)) continue;
                const long long f = phi(n, n1, n3, n5);
                if (!(static_cast<double>(std::llabs(f)) < eta * eta * eta * nmax * nmax))
                    continue;
                const double a3 = static_cast<double>(std::llabs(n3));
                const double lo =
                    eta * static_cast<double>(std::min(std::llabs(n1), std::llabs(n5)));
                const double hi = static_cast<double>(std::llabs(n5)) / eta;
                if (!(a3 >= lo && a3 <= hi)) continue;
                if (in_A1(t, eta)) continue;
                ++hits;
            }
    report(9, off_slice_ok && hits == 0,
           fmt("excluded-corner scan |n_l| <= 200 at eta = 2^-10: %lld tuples satisfy "
               "the joint hypotheses (off-slice containment %s)",
               hits, off_slice_ok ? "verified" : "VIOLATED"));
}

// ---------------------------------------------------------------------------
// 10. twin-trajectory probe
// ---------------------------------------------------------------------------
void criterion10() {
    const auto u0 = two_mode(32, 0.5, 0.25);
    StepConfig a, b;
    a.dt = 1e-3;
    b.dt = 5e-4;
    a.sigma = b.sigma = -1;
    const auto rep = twin_probe(u0, a, b, 0.5, 0.6);
    const double budget = rep.est_err_coarse + rep.est_err_fine;
    const bool pass = rep.divergence < 10.0 * budget && rep.divergence > 0.0;
    report(10, pass,
           fmt("twin probe over T=0.5: divergence %.3e vs 10 x consistency budget "
               "%.3e (coarse %.3e + fine %.3e)",
               rep.divergence, 10.0 * budget, rep.est_err_coarse, rep.est_err_fine));
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    bool all = true;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which = std::atoi(argv[i + 1]);
            all = false;
            ++i;
        } else if (std::strcmp(argv[i], "--all") == 0) {
            all = true;
        }
    }
    auto want = [&](int k) { return all || which == k; };
    if (want(1)) criterion1();
    if (want(2)) criterion2();
    if (want(3)) criterion3();
    if (want(4)) criterion4();
    if (want(5)) criterion5();
    if (want(6)) criterion6();
    if (want(7)) criterion7();
    if (want(8)) criterion8();
    if (want(9)) criterion9();
    if (want(10)) criterion10();
    return failures == 0 ? 0 : 1;
}
