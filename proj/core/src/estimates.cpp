#include "mbo/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "mbo/errors.hpp"
#include "mbo/parallel.hpp"
#include "mbo/random.hpp"
#include "mbo/spectral.hpp"

namespace mbo {

double NonnegSeq::norm_l2s(double s) const {
    double acc = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        const double w = std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), s);
        acc += w * at(n) * at(n);
    }
    return std::sqrt(acc);
}

std::string estimate_id(EstimateKind k) {
    switch (k) {
        case EstimateKind::matome0: return "matome-0";
        case EstimateKind::matome1: return "matome-1";
        case EstimateKind::matome2: return "matome-2";
        case EstimateKind::matome3: return "matome-3";
        case EstimateKind::fivelinear0: return "5linear-0";
        case EstimateKind::fivelinear1: return "5linear-1";
        case EstimateKind::fivelinear2: return "5linear-2";
        case EstimateKind::sixlinear0: return "6linear-0";
        case EstimateKind::sixlinear1: return "6linear-1";
        case EstimateKind::sixlinear2: return "6linear-2";
    }
    return "?";
}

EstimateKind parse_estimate_id(const std::string& id) {
    for (auto k : all_estimate_kinds())
        if (estimate_id(k) == id) return k;
    throw ConfigInvalid("unknown estimate id: " + id);
}

std::vector<EstimateKind> all_estimate_kinds() {
    return {EstimateKind::matome0,     EstimateKind::matome1,
            EstimateKind::matome2,     EstimateKind::matome3,
            EstimateKind::fivelinear0, EstimateKind::fivelinear1,
            EstimateKind::fivelinear2, EstimateKind::sixlinear0,
            EstimateKind::sixlinear1,  EstimateKind::sixlinear2};
}

namespace {

inline double jp(long long n) {
    return std::sqrt(1.0 + static_cast<double>(n) * static_cast<double>(n));
}

// real sequence on an arbitrary contiguous support
struct DSeq {
    long long lo = 0;
    std::vector<double> v;
    long long hi() const { return lo + static_cast<long long>(v.size()) - 1; }
    double get(long long n) const {
        if (n < lo || n > hi()) return 0.0;
        return v[static_cast<size_t>(n - lo)];
    }
    double& at(long long n) { return v[static_cast<size_t>(n - lo)]; }
};

DSeq to_dseq(const NonnegSeq& f) {
    DSeq d;
    d.lo = -f.n_max;
    d.v = f.v;
    return d;
}

DSeq dconv(const DSeq& a, const DSeq& b) {
    DSeq c;
    c.lo = a.lo + b.lo;
    c.v.assign(a.v.size() + b.v.size() - 1, 0.0);
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double ai = a.v[i];
        if (ai == 0.0) continue;
        for (size_t j = 0; j < b.v.size(); ++j) c.v[i + j] += ai * b.v[j];
    }
    return c;
}

double norm_l2s_window(const std::vector<double>& out, int N, double s) {
    double acc = 0.0;
    for (int n = -N; n <= N; ++n) {
        const double w = std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), s);
        const double x = out[static_cast<size_t>(n + N)];
        acc += w * x * x;
    }
    return std::sqrt(acc);
}

// ---- region predicates on the collapsed slice (n2 = n4 = 0) --------------

struct SliceCtx {
    long long n1, n3, n5, n, phi_v;
    bool notA1, notA2;
};

template <class F>
void for_each_slice_tuple(int N, double eta, F&& f) {
    if (!hat_collapse_valid(N, eta))
        throw ModeUnsupported(
            "estimate evaluation requires the collapsed hat support (eta * n_max < 1)");
    SliceCtx c{};
    for (long long n1 = -N; n1 <= N; ++n1)
        for (long long n3 = -N; n3 <= N; ++n3)
            for (long long n5 = -N; n5 <= N; ++n5) {
                const long long n = n1 + n3 + n5;
                if (n < -N || n > N) continue;
                const FreqTuple t{n1, 0, n3, 0, n5};
                c.n1 = n1;
                c.n3 = n3;
                c.n5 = n5;
                c.n = n;
                c.phi_v = phi(n, n1, n3, n5);
                c.notA1 = !in_A1(t, eta);
                c.notA2 = !in_A2(t, eta);
                f(c);
            }
}

// quintilinear sum with all five slots free, weight a function of the
// (n, n45) pair; exact via wide convolutions
std::vector<double> full_sum_45(const EstimateInputs& in, int N,
                                const std::function<double(long long, long long)>& w) {
    const auto A = dconv(dconv(to_dseq(in.om1), to_dseq(in.W2)), to_dseq(in.om3));
    const auto B = dconv(to_dseq(in.W4), to_dseq(in.om5));
    std::vector<double> out(static_cast<size_t>(2 * N + 1), 0.0);
    for (int n = -N; n <= N; ++n) {
        double acc = 0.0;
        for (long long m = B.lo; m <= B.hi(); ++m) {
            const double b = B.get(m);
            if (b == 0.0) continue;
            const double wt = w(n, m);
            if (wt == 0.0) continue;
            acc += wt * A.get(n - m) * b;
        }
        out[static_cast<size_t>(n + N)] = acc;
    }
    return out;
}

// weight a function of (n23, n45)
std::vector<double> full_sum_23_45(const EstimateInputs& in, int N,
                                   const std::function<double(long long, long long)>& w) {
    const auto C = to_dseq(in.om1);
    const auto D = dconv(to_dseq(in.W2), to_dseq(in.om3));
    const auto E = dconv(to_dseq(in.W4), to_dseq(in.om5));
    DSeq K;
    K.lo = D.lo + E.lo;
    K.v.assign(D.v.size() + E.v.size() - 1, 0.0);
    for (long long q = D.lo; q <= D.hi(); ++q) {
        const double d = D.get(q);
        if (d == 0.0) continue;
        for (long long r = E.lo; r <= E.hi(); ++r) {
            const double e = E.get(r);
            if (e == 0.0) continue;
            const double wt = w(q, r);
            if (wt == 0.0) continue;
            K.at(q + r) += wt * d * e;
        }
    }
    std::vector<double> out(static_cast<size_t>(2 * N + 1), 0.0);
    for (int n = -N; n <= N; ++n) {
        double acc = 0.0;
        for (long long p = K.lo; p <= K.hi(); ++p)
            acc += C.get(n - p) * K.v[static_cast<size_t>(p - K.lo)];
        out[static_cast<size_t>(n + N)] = acc;
    }
    return out;
}

double rhs_product_all_s(const EstimateInputs& in, double s) {
    return in.om1.norm_l2s(s) * in.W2.norm_l2s(s) * in.om3.norm_l2s(s) *
           in.W4.norm_l2s(s) * in.om5.norm_l2s(s);
}

double rhs_product_shifted_W(const EstimateInputs& in, double s) {
    return in.om1.norm_l2s(s) * in.om3.norm_l2s(s) * in.om5.norm_l2s(s) *
           (in.W2.norm_l2s(s + 1.0) * in.W4.norm_l2s(s) +
            in.W2.norm_l2s(s) * in.W4.norm_l2s(s + 1.0));
}

}  // namespace

TrialResult run_estimate_trial(EstimateKind kind, const EstimateInputs& in,
                               const EstimateParams& p) {
    if (!(p.s > 0.5)) throw InvalidRegularity("estimate trial requires s > 1/2");
    const int N = in.om1.n_max;
    const double s = p.s, delta = p.delta, eta = p.eta;
    TrialResult res;

    auto finish = [&](double lhs, double rhs, int wi = 0) {
        res.lhs = lhs;
        res.rhs = rhs;
        res.worst_i = wi;
        res.ratio = (rhs > 0.0) ? lhs / rhs : 0.0;
        return res;
    };
    auto legs = [&](const SliceCtx& c) {
        return in.om1.at(c.n1) * in.W2.at(0) * in.om3.at(c.n3) * in.W4.at(0) *
               in.om5.at(c.n5);
    };

    switch (kind) {
        case EstimateKind::matome1:
        case EstimateKind::matome2:
        case EstimateKind::matome3: {
            // |hat m_i| with <Phi>^{-1/2}, <Phi>^{-1}, or <Phi>^{-(1-delta)}
            const double pw = kind == EstimateKind::matome1   ? 0.5
                              : kind == EstimateKind::matome2 ? 1.0
                                                              : 1.0 - delta;
            std::array<std::vector<double>, 8> out;
            for (int i = 1; i <= 7; ++i)
                out[static_cast<size_t>(i)].assign(static_cast<size_t>(2 * N + 1), 0.0);
            for_each_slice_tuple(N, eta, [&](const SliceCtx& c) {
                if (c.phi_v == 0) return;  // hat requires |Phi| > n2^2 v n4^2 = 0
                const double lg = legs(c);
                if (lg == 0.0) return;
                const double ph = std::pow(jp(c.phi_v), -pw);
                const FreqTuple t{c.n1, 0, c.n3, 0, c.n5};
                for (int i = 1; i <= 7; ++i) {
                    if (i <= 5 ? !c.notA1 : !c.notA2) continue;
                    const double m = std::abs(multiplier({i, false}, c.n, t, 1));
                    if (m == 0.0) continue;
                    out[static_cast<size_t>(i)][static_cast<size_t>(c.n + N)] +=
                        m * ph * lg;
                }
            });
            const double out_s = kind == EstimateKind::matome3 ? s - 1.0 : s;
            double rhs;
            if (kind == EstimateKind::matome3) {
                const double o1 = in.om1.norm_l2s(s), o3 = in.om3.norm_l2s(s),
                             o5 = in.om5.norm_l2s(s);
                const double m1 = in.om1.norm_l2s(s - 1.0) * o3 * o5;
                const double m3 = o1 * in.om3.norm_l2s(s - 1.0) * o5;
                const double m5 = o1 * o3 * in.om5.norm_l2s(s - 1.0);
                rhs = std::min({m1, m3, m5}) * in.W2.norm_l2s(s) * in.W4.norm_l2s(s);
            } else if (kind == EstimateKind::matome2) {
                rhs = in.om1.norm_l2s(s) * in.om3.norm_l2s(s) * in.om5.norm_l2s(s) *
                      std::min(in.W2.norm_l2s(s - 1.0) * in.W4.norm_l2s(s),
                               in.W2.norm_l2s(s) * in.W4.norm_l2s(s - 1.0));
            } else {
                rhs = rhs_product_all_s(in, s);
            }
            double lhs = 0.0;
            int wi = 0;
            for (int i = 1; i <= 7; ++i) {
                const double li = norm_l2s_window(out[static_cast<size_t>(i)], N, out_s);
                if (li > lhs) {
                    lhs = li;
                    wi = i;
                }
            }
            return finish(lhs, rhs, wi);
        }

        case EstimateKind::matome0: {
            // |hathat m_i| = |m_i| off the hat support; full minus hat, per i
            double lhs = 0.0;
            int wi = 0;
            for (int i = 1; i <= 7; ++i) {
                std::vector<double> full;
                if (i <= 5)
                    full = full_sum_45(in, N, [&](long long n, long long m) {
                        const FreqTuple synth{n - m, 0, 0, 0, m};
                        return std::abs(multiplier({i, false}, n, synth, 1));
                    });
                else
                    full = full_sum_23_45(in, N, [&](long long q, long long r) {
                        const FreqTuple synth{-q - r, 0, q, 0, r};
                        return std::abs(multiplier({i, false}, 0, synth, 1));
                    });
                for_each_slice_tuple(N, eta, [&](const SliceCtx& c) {
                    if (c.phi_v == 0) return;
                    if (i <= 5 ? !c.notA1 : !c.notA2) return;
                    const FreqTuple t{c.n1, 0, c.n3, 0, c.n5};
                    const double m = std::abs(multiplier({i, false}, c.n, t, 1));
                    if (m == 0.0) return;
                    full[static_cast<size_t>(c.n + N)] -= m * legs(c);
                });
                const double li = norm_l2s_window(full, N, s);
                if (li > lhs) {
                    lhs = li;
                    wi = i;
                }
            }
            return finish(lhs, rhs_product_shifted_W(in, s), wi);
        }

        case EstimateKind::fivelinear0: {
            // n45 over A1 with n > 0, n45 < 0: full minus the off-A1 slice
            auto full = full_sum_45(in, N, [](long long n, long long m) {
                return (n > 0 && m < 0) ? static_cast<double>(m) : 0.0;
            });
            for_each_slice_tuple(N, eta, [&](const SliceCtx& c) {
                if (!c.notA1) return;
                if (!(c.n > 0 && c.n5 < 0)) return;
                full[static_cast<size_t>(c.n + N)] -=
                    static_cast<double>(c.n5) * legs(c);
            });
            return finish(norm_l2s_window(full, N, s), rhs_product_shifted_W(in, s));
        }

        case EstimateKind::fivelinear1:
        case EstimateKind::fivelinear2: {
            std::vector<double> out(static_cast<size_t>(2 * N + 1), 0.0);
            const bool two = kind == EstimateKind::fivelinear2;
            for_each_slice_tuple(N, eta, [&](const SliceCtx& c) {
                if (!c.notA1 || !(c.n > 0 && c.n5 < 0)) return;
                double w = static_cast<double>(c.n5);
                if (two) {
                    const long long nmax =
                        std::max({std::llabs(c.n1), std::llabs(c.n3), std::llabs(c.n5)});
                    w *= std::pow(jp(c.phi_v), -(1.0 - delta)) * jp(nmax) / jp(c.n);
                } else {
                    w /= std::sqrt(jp(c.phi_v));
                }
                out[static_cast<size_t>(c.n + N)] += w * legs(c);
            });
            return finish(norm_l2s_window(out, N, s), rhs_product_all_s(in, s));
        }

        case EstimateKind::sixlinear0: {
            auto full = full_sum_23_45(in, N, [](long long q, long long r) {
                return (q > 0 && r > 0)
                           ? static_cast<double>(q) * static_cast<double>(r) /
                                 static_cast<double>(q + r)
                           : 0.0;
            });
            for_each_slice_tuple(N, eta, [&](const SliceCtx& c) {
                if (!c.notA2) return;
                if (!(c.n3 > 0 && c.n5 > 0)) return;
                const double w = static_cast<double>(c.n3) * static_cast<double>(c.n5) /
                                 static_cast<double>(c.n3 + c.n5);
                full[static_cast<size_t>(c.n + N)] -= w * legs(c);
            });
            return finish(norm_l2s_window(full, N, s), rhs_product_shifted_W(in, s));
        }

        case EstimateKind::sixlinear1:
        case EstimateKind::sixlinear2: {
            std::vector<double> out(static_cast<size_t>(2 * N + 1), 0.0);
            const bool two = kind == EstimateKind::sixlinear2;
            for_each_slice_tuple(N, eta, [&](const SliceCtx& c) {
                if (!c.notA2 || !(c.n3 > 0 && c.n5 > 0)) return;
                double w = static_cast<double>(c.n3) * static_cast<double>(c.n5) /
                           static_cast<double>(c.n3 + c.n5);
                if (two) {
                    const long long nmax =
                        std::max({std::llabs(c.n1), std::llabs(c.n3), std::llabs(c.n5)});
                    w *= std::pow(jp(c.phi_v), -(1.0 - delta)) * jp(nmax) / jp(c.n);
                } else {
                    w /= std::sqrt(jp(c.phi_v));
                }
                out[static_cast<size_t>(c.n + N)] += w * legs(c);
            });
            return finish(norm_l2s_window(out, N, s), rhs_product_all_s(in, s));
        }
    }
    throw ConfigInvalid("run_estimate_trial: bad kind");
}

EstimateInputs make_trial_inputs(int n_max, EstimateKind kind, uint64_t seed, int trial,
                                 double s) {
    Rng rng(seed ^ (0xABCD1234u + static_cast<uint64_t>(kind)),
            static_cast<uint64_t>(trial));
    EstimateInputs in{NonnegSeq(n_max), NonnegSeq(n_max), NonnegSeq(n_max),
                      NonnegSeq(n_max), NonnegSeq(n_max)};
    auto fill_uniform = [&](NonnegSeq& f) {
        for (int n = -n_max; n <= n_max; ++n) f.ref(n) = rng.uniform();
    };
    auto fill_colored = [&](NonnegSeq& f) {
        for (int n = -n_max; n <= n_max; ++n)
            f.ref(n) = std::pow(jp(n), -(s + 0.5)) * rng.uniform();
    };
    switch (trial % 3) {
        case 0:
            fill_uniform(in.om1);
            fill_uniform(in.W2);
            fill_uniform(in.om3);
            fill_uniform(in.W4);
            fill_uniform(in.om5);
            break;
        case 1:
            fill_colored(in.om1);
            fill_colored(in.W2);
            fill_colored(in.om3);
            fill_colored(in.W4);
            fill_colored(in.om5);
            break;
        default: {
            // spikes at the case boundaries of the region analysis: large
            // nearly-cancelling frequencies and weight slots concentrated at 0
            const long long a = rng.uniform_int(n_max / 2, n_max);
            const long long shift = rng.uniform_int(-2, 2);
            in.om1.ref(a) = 1.0;
            in.om3.ref(rng.uniform_int(-n_max / 4, n_max / 4)) = 1.0;
            in.om5.ref(std::max<long long>(-n_max, -a + shift)) = 1.0;
            in.W2.ref(0) = 1.0;
            in.W4.ref(0) = 1.0;
            for (int n = -n_max; n <= n_max; ++n) {
                in.W2.ref(n) += 0.01 * std::pow(jp(n), -(s + 1.5)) * rng.uniform();
                in.W4.ref(n) += 0.01 * std::pow(jp(n), -(s + 1.5)) * rng.uniform();
            }
            break;
        }
    }
    return in;
}

EstimateReport verify_estimate(EstimateKind kind, double s, double delta,
                               const std::vector<int>& sizes, int trials, uint64_t seed,
                               double eta, int threads) {
    if (!(s > 0.5)) throw InvalidRegularity("verify_estimate requires s > 1/2");
    if (threads <= 0) threads = default_thread_count();
    EstimateReport rep;
    rep.id = estimate_id(kind);
    rep.s = s;
    rep.delta = delta;
    rep.eta = eta;
    rep.seed = seed;
    rep.trials = trials;

    EstimateParams params{s, delta, eta};
    for (int N : sizes) {
        std::vector<double> ratio(static_cast<size_t>(trials), 0.0);
        std::vector<int> wi(static_cast<size_t>(trials), 0);
        parallel_for(0, trials, threads, [&](long long tr) {
            const auto in = make_trial_inputs(N, kind, seed, static_cast<int>(tr), s);
            const auto res = run_estimate_trial(kind, in, params);
            ratio[static_cast<size_t>(tr)] = res.ratio;
            wi[static_cast<size_t>(tr)] = res.worst_i;
        });
        EstimateSizeResult r;
        r.n_max = N;
        for (int tr = 0; tr < trials; ++tr) {
            if (ratio[static_cast<size_t>(tr)] > r.worst_ratio) {
                r.worst_ratio = ratio[static_cast<size_t>(tr)];
                r.worst_trial = tr;
                r.worst_i = wi[static_cast<size_t>(tr)];
            }
        }
        rep.sizes.push_back(r);
    }
    // least-squares slope of log worst_ratio against log N
    if (rep.sizes.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (const auto& r : rep.sizes) {
            if (r.worst_ratio <= 0.0) continue;
            const double x = std::log(static_cast<double>(r.n_max));
            const double y = std::log(r.worst_ratio);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2)
            rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    return rep;
}

double replay_witness(const EstimateReport& rep, size_t size_index) {
    const auto& r = rep.sizes.at(size_index);
    const auto kind = parse_estimate_id(rep.id);
    const auto in = make_trial_inputs(r.n_max, kind, rep.seed, r.worst_trial, rep.s);
    EstimateParams params{rep.s, rep.delta, rep.eta};
    return run_estimate_trial(kind, in, params).ratio;
}

}  // namespace mbo
