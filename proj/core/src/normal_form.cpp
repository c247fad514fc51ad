#include "mbo/normal_form.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "mbo/errors.hpp"
#include "mbo/parallel.hpp"
#include "mbo/random.hpp"

namespace mbo {

namespace {

inline cplx polar1(double ph) { return cplx{std::cos(ph), std::sin(ph)}; }

inline double linear_phase(long long n) {
    return static_cast<double>(n) * std::abs(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// wide sequences: exact convolutions without intermediate truncation
// ---------------------------------------------------------------------------

struct WideSeq {
    long long lo = 0;
    std::vector<cplx> v;

    long long hi() const { return lo + static_cast<long long>(v.size()) - 1; }
    cplx get(long long n) const {
        if (n < lo || n > hi()) return cplx{0.0, 0.0};
        return v[static_cast<size_t>(n - lo)];
    }
    cplx& at(long long n) { return v[static_cast<size_t>(n - lo)]; }
};

WideSeq to_wide(const SpectralField& f) {
    WideSeq w;
    w.lo = -f.n_max();
    w.v.assign(static_cast<size_t>(f.size()), cplx{});
    for (int n = -f.n_max(); n <= f.n_max(); ++n) w.at(n) = f(n);
    return w;
}

WideSeq conv(const WideSeq& a, const WideSeq& b) {
    WideSeq c;
    c.lo = a.lo + b.lo;
    c.v.assign(a.v.size() + b.v.size() - 1, cplx{});
    for (size_t i = 0; i < a.v.size(); ++i) {
        const cplx ai = a.v[i];
        if (ai == cplx{}) continue;
        for (size_t j = 0; j < b.v.size(); ++j) c.v[i + j] += ai * b.v[j];
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// twisting
// ---------------------------------------------------------------------------

TwistedState twist(double t, const SpectralField& v) {
    TwistedState st;
    st.t = t;
    st.omega = SpectralField(v.n_max(), false);
    for (int n = -v.n_max(); n <= v.n_max(); ++n)
        st.omega.at(n) = polar1(t * linear_phase(n)) * v(n);
    st.omega_star = conj_field(st.omega);
    return st;
}

std::vector<TwistedState> twist(const std::vector<double>& times,
                                const std::vector<SpectralField>& v_states) {
    std::vector<TwistedState> out;
    out.reserve(times.size());
    for (size_t k = 0; k < times.size(); ++k) out.push_back(twist(times[k], v_states[k]));
    return out;
}

SpectralField untwist(const TwistedState& st) {
    SpectralField v(st.omega.n_max(), false);
    for (int n = -v.n_max(); n <= v.n_max(); ++n)
        v.at(n) = polar1(-st.t * linear_phase(n)) * st.omega(n);
    return v;
}

// ---------------------------------------------------------------------------
// slot table
// ---------------------------------------------------------------------------

std::array<Slot, 5> slot_pattern(MultiplierId id) {
    using K = Slot::Kind;
    auto W = [](int k) { return Slot{K::weight, k}; };
    constexpr Slot om{K::state, 0};
    constexpr Slot os{K::state_star, 0};
    std::array<Slot, 5> p{};
    switch (id.i) {
        case 1: p = {om, W(1), om, W(-1), os}; break;
        case 2: p = {os, W(-3), os, W(-1), os}; break;
        case 3: p = {om, W(1), om, W(1), om}; break;
        case 4: p = {om, W(-1), os, W(1), om}; break;
        case 5: p = {os, W(-3), os, W(1), om}; break;
        case 6: p = {om, W(1), om, W(1), om}; break;
        case 7: p = {om, W(-1), os, W(-1), os}; break;
        default: throw ConfigInvalid("slot_pattern: index out of range");
    }
    if (id.starred) {
        for (auto& s : p) {
            if (s.kind == Slot::state)
                s.kind = Slot::state_star;
            else if (s.kind == Slot::state_star)
                s.kind = Slot::state;
            else
                s.k = -s.k;
        }
    }
    return p;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::boundary: return "N0";
        case Family::resonant: return "NR";
        case Family::weight_dt: return "N1";
        case Family::remainder: return "R";
        case Family::next: return "Nnext";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// brute-force quintilinear form
// ---------------------------------------------------------------------------

namespace {

inline cplx slot_value(const Slot& s, const TwistedState& st, const GaugeWeights& gw,
                       long long n) {
    switch (s.kind) {
        case Slot::state: return st.omega(n);
        case Slot::state_star: return st.omega_star(n);
        default: return gw.exp(s.k)(n);
    }
}

}  // namespace

SpectralField eval_Q(MultiplierId id, const WeightFn& weight, const TwistedState& st,
                     const GaugeWeights& gw) {
    const int N = st.omega.n_max();
    const auto p = slot_pattern(id);
    SpectralField out(N, false);
    for (int n = -N; n <= N; ++n) {
        cplx acc{0.0, 0.0};
        for (int n1 = -N; n1 <= N; ++n1) {
            const cplx l1 = slot_value(p[0], st, gw, n1);
            if (l1 == cplx{}) continue;
            for (int n2 = -N; n2 <= N; ++n2) {
                const cplx l12 = l1 * slot_value(p[1], st, gw, n2);
                if (l12 == cplx{}) continue;
                for (int n3 = -N; n3 <= N; ++n3) {
                    const cplx l123 = l12 * slot_value(p[2], st, gw, n3);
                    if (l123 == cplx{}) continue;
                    for (int n4 = -N; n4 <= N; ++n4) {
                        const long long n5 = static_cast<long long>(n) - n1 - n2 - n3 - n4;
                        if (n5 < -N || n5 > N) continue;
                        const FreqTuple t{n1, n2, n3, n4, n5};
                        const cplx w = weight(n, t);
                        if (w == cplx{}) continue;
                        acc += w * l123 * slot_value(p[3], st, gw, n4) *
                               slot_value(p[4], st, gw, n5);
                    }
                }
            }
        }
        out.at(n) = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// hat-support iteration
// ---------------------------------------------------------------------------

namespace {

struct HatTermCtx {
    long long n = 0;
    FreqTuple t;
    long long phi = 0;
    int i = 1;       // multiplier index, unstarred
    double hat = 0;  // hat multiplier value
};

// Visits every (i, tuple) with nonzero hat multiplier on the window.  When
// eta * n_max < 1 the complements of A1 and A2 force n2 = n4 = 0 (any other
// tuple trips the |n2| v |n4| threshold, and the remaining A1 branches are
// empty or contained in the first one at this scale), so iteration is over
// (n1, n3, n5) only; otherwise all five variables are scanned.
template <class F>
void for_each_hat_term(int N, double eta, int sigma, F&& f) {
    const bool collapse = hat_collapse_valid(N, eta);
    const long long lo2 = collapse ? 0 : -N, hi2 = collapse ? 0 : N;
    HatTermCtx c;
    for (long long n1 = -N; n1 <= N; ++n1)
        for (long long n2 = lo2; n2 <= hi2; ++n2)
            for (long long n3 = -N; n3 <= N; ++n3)
                for (long long n4 = lo2; n4 <= hi2; ++n4)
                    for (long long n5 = -N; n5 <= N; ++n5) {
                        const long long n = n1 + n2 + n3 + n4 + n5;
                        if (n < -N || n > N) continue;
                        const FreqTuple t{n1, n2, n3, n4, n5};
                        const long long ph = phi(n, n1, n3, n5);
                        const long long cutoff = std::max(n2 * n2, n4 * n4);
                        if (std::llabs(ph) <= cutoff) continue;
                        const bool okA = !in_A1(t, eta);
                        const bool okB = !in_A2(t, eta);
                        if (!okA && !okB) continue;
                        c.n = n;
                        c.t = t;
                        c.phi = ph;
                        for (int i = 1; i <= 7; ++i) {
                            if (i <= 5 ? !okA : !okB) continue;
                            const double m = multiplier({i, false}, n, t, sigma);
                            if (m == 0.0) continue;
                            c.i = i;
                            c.hat = m;
                            f(c);
                        }
                    }
}

struct IdScalars {
    std::array<Slot, 5> pattern;
    cplx w24;   // W2(0) W4(0)
    cplx dw24;  // d/dt of that product
};

std::array<IdScalars, 8> id_scalars(const NfSample& s) {
    std::array<IdScalars, 8> out{};
    for (int i = 1; i <= 7; ++i) {
        auto& e = out[static_cast<size_t>(i)];
        e.pattern = slot_pattern({i, false});
        const int k2 = e.pattern[1].k, k4 = e.pattern[3].k;
        e.w24 = s.w0.at(k2) * s.w0.at(k4);
        e.dw24 = s.dw0.at(k2) * s.w0.at(k4) + s.w0.at(k2) * s.dw0.at(k4);
    }
    return out;
}

inline cplx state_leg(const NfSample& s, const Slot& sl, long long n) {
    return sl.kind == Slot::state ? s.ts.omega(n) : s.ts.omega_star(n);
}

// value of a substituted field at a state leg: plain for an omega leg,
// conjugate-reflected for an omega* leg
inline cplx sub_value(const SpectralField& g, const Slot& sl, long long n) {
    return sl.kind == Slot::state ? g(n) : std::conj(g(-n));
}

}  // namespace

// ---------------------------------------------------------------------------
// full-multiplier sum via wide convolutions
// ---------------------------------------------------------------------------

SpectralField q_full_sum(const NfSample& s) {
    const int N = s.u.n_max();
    const SpectralField vf = untwist(s.ts);
    const SpectralField vb = conj_field(vf);

    auto leg_wide = [&](const Slot& sl) {
        switch (sl.kind) {
            case Slot::state: return to_wide(vf);
            case Slot::state_star: return to_wide(vb);
            default: return to_wide(s.gw.exp(sl.k));
        }
    };

    SpectralField acc(N, false);
    for (int i = 1; i <= 7; ++i) {
        const MultiplierId id{i, false};
        const auto p = slot_pattern(id);
        if (i <= 5) {
            // weight depends on (n, n45) only; contract slots (1,2,3) and (4,5)
            const auto A = conv(conv(leg_wide(p[0]), leg_wide(p[1])), leg_wide(p[2]));
            const auto B = conv(leg_wide(p[3]), leg_wide(p[4]));
            for (int n = -N; n <= N; ++n) {
                cplx sum{0.0, 0.0};
                for (long long m = B.lo; m <= B.hi(); ++m) {
                    const cplx b = B.get(m);
                    if (b == cplx{}) continue;
                    const FreqTuple synth{n - m, 0, 0, 0, m};
                    const double w = multiplier(id, n, synth, s.sigma);
                    if (w == 0.0) continue;
                    sum += w * A.get(n - m) * b;
                }
                acc.at(n) += complex_unit(id) * sum;
            }
        } else {
            // weight depends on (n23, n45); contract (2,3) and (4,5), keep slot 1
            const auto C = leg_wide(p[0]);
            const auto D = conv(leg_wide(p[1]), leg_wide(p[2]));
            const auto E = conv(leg_wide(p[3]), leg_wide(p[4]));
            WideSeq K;
            K.lo = D.lo + E.lo;
            K.v.assign(D.v.size() + E.v.size() - 1, cplx{});
            for (long long q = D.lo; q <= D.hi(); ++q) {
                const cplx d = D.get(q);
                if (d == cplx{}) continue;
                for (long long r = E.lo; r <= E.hi(); ++r) {
                    const cplx e = E.get(r);
                    if (e == cplx{}) continue;
                    const FreqTuple synth{-q - r, 0, q, 0, r};
                    const double w = multiplier(id, 0, synth, s.sigma);
                    if (w == 0.0) continue;
                    K.at(q + r) += w * d * e;
                }
            }
            for (int n = -N; n <= N; ++n) {
                cplx sum{0.0, 0.0};
                for (long long pp = K.lo; pp <= K.hi(); ++pp)
                    sum += C.get(n - pp) * K.v[static_cast<size_t>(pp - K.lo)];
                acc.at(n) += complex_unit(id) * sum;
            }
        }
    }
    // output twist e^{i t n|n|}
    for (int n = -N; n <= N; ++n) acc.at(n) *= polar1(s.t * linear_phase(n));
    return acc;
}

// ---------------------------------------------------------------------------
// sample assembly
// ---------------------------------------------------------------------------

namespace {

SpectralField build_hat_n1(const NfSample& s) {
    const int N = s.u.n_max();
    SpectralField out(N, false);
    const auto ids = id_scalars(s);
    for_each_hat_term(N, s.eta, s.sigma, [&](const HatTermCtx& c) {
        const auto& e = ids[static_cast<size_t>(c.i)];
        const cplx legs = state_leg(s, e.pattern[0], c.t.n1) *
                          state_leg(s, e.pattern[2], c.t.n3) *
                          state_leg(s, e.pattern[4], c.t.n5) *
                          s.gw.exp(e.pattern[1].k)(c.t.n2) *
                          s.gw.exp(e.pattern[3].k)(c.t.n4);
        const cplx mc = complex_unit({c.i, false}) * c.hat;
        out.at(static_cast<int>(c.n)) +=
            polar1(s.t * static_cast<double>(c.phi)) * mc * legs;
    });
    return out;
}

SpectralField twisted_remainder(const SpectralField& u, double t, int sigma,
                                ProductMode mode) {
    const auto Ru = remainder_R(u, sigma, mode);
    SpectralField out(u.n_max(), false);
    for (int n = -u.n_max(); n <= u.n_max(); ++n)
        out.at(n) = polar1(t * linear_phase(n)) * Ru(n);
    return out;
}

}  // namespace

NfSample make_nf_sample(double t, const SpectralField& u, int sigma, double eta,
                        ProductMode mode) {
    NfSample s;
    s.t = t;
    s.sigma = sigma;
    s.eta = eta;
    s.mode = mode;
    s.u = u;
    const auto gt = gauge_transform(u, sigma, mode);
    s.v = gt.v;
    s.nu = gt.nu;
    s.ts = twist(t, s.v);
    s.gw = make_gauge_weights(u, sigma, mode);
    for (int k : {1, -1, 3, -3}) {
        s.dw_field.emplace(k, dt_gauge_exp(s.gw, u, k, mode));
        s.w0[k] = s.gw.exp(k)(0);
        s.dw0[k] = s.dw_field.at(k)(0);
    }
    s.hat_n1 = build_hat_n1(s);
    s.r0 = q_full_sum(s) - s.hat_n1 + twisted_remainder(u, t, sigma, mode);
    return s;
}

SpectralField eval_R0(const TwistedState& st, const SpectralField& u,
                      const GaugeWeights& gw, int sigma, double eta, ProductMode mode) {
    NfSample s;
    s.t = st.t;
    s.sigma = sigma;
    s.eta = eta;
    s.mode = mode;
    s.u = u;
    s.v = untwist(st);
    s.nu = u(0).real();
    s.ts = st;
    s.gw = gw;
    for (int k : {1, -1, 3, -3}) {
        s.w0[k] = gw.exp(k)(0);
        s.dw0[k] = cplx{0.0, 0.0};  // unused by the hat sum
    }
    const auto hat = build_hat_n1(s);
    return q_full_sum(s) - hat + twisted_remainder(u, st.t, sigma, mode);
}

// ---------------------------------------------------------------------------
// generation-1 families
// ---------------------------------------------------------------------------

FamiliesJ1 eval_families_j1(const NfSample& s, double M) {
    const int N = s.u.n_max();
    FamiliesJ1 F{SpectralField(N), SpectralField(N), SpectralField(N), SpectralField(N),
                 SpectralField(N)};
    const auto ids = id_scalars(s);
    for_each_hat_term(N, s.eta, s.sigma, [&](const HatTermCtx& c) {
        const auto& e = ids[static_cast<size_t>(c.i)];
        const std::array<long long, 3> freqs{c.t.n1, c.t.n3, c.t.n5};
        const std::array<const Slot*, 3> slots{&e.pattern[0], &e.pattern[2],
                                               &e.pattern[4]};
        std::array<cplx, 3> lv;
        for (int j = 0; j < 3; ++j)
            lv[static_cast<size_t>(j)] = state_leg(s, *slots[static_cast<size_t>(j)],
                                                   freqs[static_cast<size_t>(j)]);
        const cplx legs = lv[0] * lv[1] * lv[2];
        const cplx wleg2 = s.gw.exp(e.pattern[1].k)(c.t.n2);
        const cplx wleg4 = s.gw.exp(e.pattern[3].k)(c.t.n4);
        const cplx w24 = wleg2 * wleg4;
        const cplx mc = complex_unit({c.i, false}) * c.hat;
        const cplx phase = polar1(s.t * static_cast<double>(c.phi));
        const int n = static_cast<int>(c.n);

        if (static_cast<double>(std::llabs(c.phi)) <= M) {
            F.resonant.at(n) += phase * mc * w24 * legs;
            return;
        }
        const cplx base = phase * mc / cplx{0.0, static_cast<double>(c.phi)};
        F.boundary.at(n) += base * w24 * legs;
        cplx dw24;
        if (c.t.n2 == 0 && c.t.n4 == 0)
            dw24 = e.dw24;
        else
            dw24 = s.dw_field.at(e.pattern[1].k)(c.t.n2) * wleg4 +
                   wleg2 * s.dw_field.at(e.pattern[3].k)(c.t.n4);
        F.weight_dt.at(n) += -base * dw24 * legs;
        for (int b = 0; b < 3; ++b) {
            const cplx other = lv[(b + 1) % 3] * lv[(b + 2) % 3];
            const cplx r0b = sub_value(s.r0, *slots[static_cast<size_t>(b)],
                                       freqs[static_cast<size_t>(b)]);
            const cplx n1b = sub_value(s.hat_n1, *slots[static_cast<size_t>(b)],
                                       freqs[static_cast<size_t>(b)]);
            F.remainder.at(n) += -base * w24 * r0b * other;
            F.next.at(n) += -base * w24 * n1b * other;
        }
    });
    return F;
}

// ---------------------------------------------------------------------------
// generation-2 families: phase-resolved inner objects
// ---------------------------------------------------------------------------

namespace {

struct PhiResolved {
    int n_max = 0;
    long long span = 0;  // phi in [-span, span]
    std::vector<cplx> d;

    PhiResolved() = default;
    PhiResolved(int N, long long sp)
        : n_max(N), span(sp),
          d(static_cast<size_t>(2 * N + 1) * static_cast<size_t>(2 * sp + 1)) {}
    size_t idx(long long m, long long p) const {
        return static_cast<size_t>(m + n_max) * static_cast<size_t>(2 * span + 1) +
               static_cast<size_t>(p + span);
    }
    cplx& at(long long m, long long p) { return d[idx(m, p)]; }
    cplx get(long long m, long long p) const {
        if (m < -n_max || m > n_max || p < -span || p > span) return cplx{};
        return d[idx(m, p)];
    }
    bool empty() const { return d.empty(); }
};

enum class InnerVariant { plain, weight_dt, remainder_sub };

PhiResolved inner_hat_sum(const NfSample& s, InnerVariant variant) {
    const int N = s.u.n_max();
    const long long span = 4LL * N * N;
    PhiResolved G(N, span);
    const auto ids = id_scalars(s);
    for_each_hat_term(N, s.eta, s.sigma, [&](const HatTermCtx& c) {
        const auto& e = ids[static_cast<size_t>(c.i)];
        const std::array<long long, 3> freqs{c.t.n1, c.t.n3, c.t.n5};
        const std::array<const Slot*, 3> slots{&e.pattern[0], &e.pattern[2],
                                               &e.pattern[4]};
        std::array<cplx, 3> lv;
        for (int j = 0; j < 3; ++j)
            lv[static_cast<size_t>(j)] = state_leg(s, *slots[static_cast<size_t>(j)],
                                                   freqs[static_cast<size_t>(j)]);
        const cplx wleg2 = s.gw.exp(e.pattern[1].k)(c.t.n2);
        const cplx wleg4 = s.gw.exp(e.pattern[3].k)(c.t.n4);
        const cplx mc = complex_unit({c.i, false}) * c.hat;
        const cplx phase = polar1(s.t * static_cast<double>(c.phi));
        cplx val{0.0, 0.0};
        switch (variant) {
            case InnerVariant::plain:
                val = wleg2 * wleg4 * lv[0] * lv[1] * lv[2];
                break;
            case InnerVariant::weight_dt: {
                cplx dw24;
                if (c.t.n2 == 0 && c.t.n4 == 0)
                    dw24 = e.dw24;
                else
                    dw24 = s.dw_field.at(e.pattern[1].k)(c.t.n2) * wleg4 +
                           wleg2 * s.dw_field.at(e.pattern[3].k)(c.t.n4);
                val = dw24 * lv[0] * lv[1] * lv[2];
                break;
            }
            case InnerVariant::remainder_sub: {
                cplx acc{0.0, 0.0};
                for (int b = 0; b < 3; ++b)
                    acc += sub_value(s.r0, *slots[static_cast<size_t>(b)],
                                     freqs[static_cast<size_t>(b)]) *
                           lv[(b + 1) % 3] * lv[(b + 2) % 3];
                val = wleg2 * wleg4 * acc;
                break;
            }
        }
        G.at(c.n, c.phi) += phase * mc * val;
    });
    return G;
}

}  // namespace

// Coupled kernels of the second reduction step.  res sums the inner object
// over |Phi1+phi| <= 2|Phi1|; nonres over the complement with the extra
// 1/(i(Phi1+phi)).
struct J2Kernels {
    PhiResolved plain_res, plain_nonres, dw_nonres, r0_nonres;

    static void couple(const PhiResolved& G, PhiResolved* res, PhiResolved* nonres,
                       int threads) {
        const int N = G.n_max;
        const long long span = G.span;
        if (res) *res = PhiResolved(N, span);
        if (nonres) *nonres = PhiResolved(N, span);
        parallel_for(-N, N + 1, threads, [&](long long m) {
            // attained inner phases only; the support is sparse in phi
            std::vector<std::pair<long long, cplx>> nz;
            for (long long ph = -span; ph <= span; ++ph) {
                const cplx g = G.get(m, ph);
                if (g != cplx{}) nz.emplace_back(ph, g);
            }
            if (nz.empty()) return;
            for (long long P1 = -span; P1 <= span; ++P1) {
                cplx r{0.0, 0.0}, nr{0.0, 0.0};
                const long long lim = 2 * std::llabs(P1);
                for (const auto& [ph, g] : nz) {
                    const long long cum = P1 + ph;
                    if (std::llabs(cum) <= lim)
                        r += g;
                    else
                        nr += g / cplx{0.0, static_cast<double>(cum)};
                }
                if (res) res->at(m, P1) = r;
                if (nonres) nonres->at(m, P1) = nr;
            }
        });
    }
};

std::shared_ptr<const J2Kernels> make_j2_kernels(const NfSample& s, int threads) {
    if (threads <= 0) threads = default_thread_count();
    auto K = std::make_shared<J2Kernels>();
    const auto G_plain = inner_hat_sum(s, InnerVariant::plain);
    const auto G_dw = inner_hat_sum(s, InnerVariant::weight_dt);
    const auto G_r0 = inner_hat_sum(s, InnerVariant::remainder_sub);
    J2Kernels::couple(G_plain, &K->plain_res, &K->plain_nonres, threads);
    J2Kernels::couple(G_dw, nullptr, &K->dw_nonres, threads);
    J2Kernels::couple(G_r0, nullptr, &K->r0_nonres, threads);
    return K;
}

namespace {

inline cplx kernel_lookup(const PhiResolved& S, const Slot& sl, long long m,
                          long long P1) {
    // starred legs substitute the starred inner equation, whose value is the
    // conjugate reflection in both frequency and cumulative phase
    return sl.kind == Slot::state ? S.get(m, P1) : std::conj(S.get(-m, -P1));
}

}  // namespace

FamiliesJ2 eval_families_j2(const NfSample& s, double M,
                            std::shared_ptr<const J2Kernels> kernels) {
    const int N = s.u.n_max();
    FamiliesJ2 F{SpectralField(N), SpectralField(N), SpectralField(N), SpectralField(N)};
    if (!kernels) kernels = make_j2_kernels(s);
    const J2Kernels& K = *kernels;

    const auto ids = id_scalars(s);
    for_each_hat_term(N, s.eta, s.sigma, [&](const HatTermCtx& c) {
        if (static_cast<double>(std::llabs(c.phi)) <= M) return;
        const auto& e = ids[static_cast<size_t>(c.i)];
        const std::array<long long, 3> freqs{c.t.n1, c.t.n3, c.t.n5};
        const std::array<const Slot*, 3> slots{&e.pattern[0], &e.pattern[2],
                                               &e.pattern[4]};
        std::array<cplx, 3> lv;
        for (int j = 0; j < 3; ++j)
            lv[static_cast<size_t>(j)] = state_leg(s, *slots[static_cast<size_t>(j)],
                                                   freqs[static_cast<size_t>(j)]);
        const cplx wleg2 = s.gw.exp(e.pattern[1].k)(c.t.n2);
        const cplx wleg4 = s.gw.exp(e.pattern[3].k)(c.t.n4);
        const cplx w24 = wleg2 * wleg4;
        cplx dw24;
        if (c.t.n2 == 0 && c.t.n4 == 0)
            dw24 = e.dw24;
        else
            dw24 = s.dw_field.at(e.pattern[1].k)(c.t.n2) * wleg4 +
                   wleg2 * s.dw_field.at(e.pattern[3].k)(c.t.n4);
        const cplx base = polar1(s.t * static_cast<double>(c.phi)) *
                          complex_unit({c.i, false}) * c.hat /
                          cplx{0.0, static_cast<double>(c.phi)};
        const int n = static_cast<int>(c.n);

        for (int b = 0; b < 3; ++b) {
            const Slot& sb = *slots[static_cast<size_t>(b)];
            const long long nb = freqs[static_cast<size_t>(b)];
            const cplx other = lv[(b + 1) % 3] * lv[(b + 2) % 3];
            const cplx Sres = kernel_lookup(K.plain_res, sb, nb, c.phi);
            const cplx Snr = kernel_lookup(K.plain_nonres, sb, nb, c.phi);
            const cplx Sdw = kernel_lookup(K.dw_nonres, sb, nb, c.phi);
            const cplx Sr0 = kernel_lookup(K.r0_nonres, sb, nb, c.phi);

            F.resonant.at(n) += -base * w24 * other * Sres;
            F.boundary.at(n) += -base * w24 * other * Snr;
            F.weight_dt.at(n) += base * (dw24 * Snr + w24 * Sdw) * other;
            // remainder substitution at an outer leg keeps the inner plain
            cplx outer_sub{0.0, 0.0};
            for (int bp = 0; bp < 3; ++bp) {
                if (bp == b) continue;
                const int brest = 3 - b - bp;
                outer_sub += sub_value(s.r0, *slots[static_cast<size_t>(bp)],
                                       freqs[static_cast<size_t>(bp)]) *
                             lv[static_cast<size_t>(brest)];
            }
            F.remainder.at(n) += base * w24 * (outer_sub * Snr + other * Sr0);
        }
    });
    return F;
}

// ---------------------------------------------------------------------------
// generation 3 by Monte Carlo
// ---------------------------------------------------------------------------

double McField::norm_error(double s) const {
    double acc = 0.0;
    for (int n = -mean.n_max(); n <= mean.n_max(); ++n) {
        const double w = std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), s);
        acc += w * variance[static_cast<size_t>(n + mean.n_max())];
    }
    return std::sqrt(acc);
}

double McField::debiased_norm(double s) const {
    double acc = 0.0;
    for (int n = -mean.n_max(); n <= mean.n_max(); ++n) {
        const double w = std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), s);
        acc += w * (std::norm(mean(n)) - variance[static_cast<size_t>(n + mean.n_max())]);
    }
    return std::sqrt(std::max(0.0, acc));
}

McGeneration3 mc_generation3(const NfSample& s, double M, long long samples,
                             uint64_t seed, int threads) {
    const int N = s.u.n_max();
    if (!hat_collapse_valid(N, s.eta))
        throw ModeUnsupported(
            "mc_generation3: sampler assumes the collapsed hat support (eta * n_max < 1)");
    if (threads <= 0) threads = default_thread_count();
    const auto ids = id_scalars(s);
    const double W = static_cast<double>(2 * N + 1);
    double space = 3.0 * 5.0 * 343.0;
    for (int j = 0; j < 7; ++j) space *= W;

    // five accumulated objects: next_j2 and the four J=3 families
    constexpr int kObjs = 5;
    struct Accum {
        std::array<std::vector<cplx>, kObjs> sum;
        std::array<std::vector<double>, kObjs> sum2;
    };
    std::vector<Accum> acc(static_cast<size_t>(threads));
    for (auto& a : acc)
        for (int o = 0; o < kObjs; ++o) {
            a.sum[static_cast<size_t>(o)].assign(static_cast<size_t>(2 * N + 1), cplx{});
            a.sum2[static_cast<size_t>(o)].assign(static_cast<size_t>(2 * N + 1), 0.0);
        }
    const long long per = (samples + threads - 1) / threads;
    const std::array<int, 3> leg_to_slot{0, 2, 4};

    parallel_for(0, threads, threads, [&](long long tid) {
        Rng rng(seed, static_cast<uint64_t>(tid) + 1);
        auto& a = acc[static_cast<size_t>(tid)];
        const long long count = std::max<long long>(0, std::min(per, samples - tid * per));
        for (long long it = 0; it < count; ++it) {
            const int b1 = static_cast<int>(rng.uniform_int(0, 2));  // gen-2 host leg
            const int b2 = static_cast<int>(rng.uniform_int(0, 4));  // gen-3 host leg
            const int i1 = static_cast<int>(rng.uniform_int(1, 7));
            const int i2 = static_cast<int>(rng.uniform_int(1, 7));
            const int i3 = static_cast<int>(rng.uniform_int(1, 7));
            std::array<long long, 7> fr;
            for (auto& x : fr) x = rng.uniform_int(-N, N);

            // gen-3 state-leg frequencies and node value
            const std::array<long long, 3> m3{fr[0], fr[1], fr[2]};
            const long long n3 = m3[0] + m3[1] + m3[2];

            // b2 in {0,1}: gen-3 hangs at one of the two gen-1 legs not
            // hosting gen-2; b2 in {2,3,4}: gen-3 hangs below gen-2.
            const bool below_two = b2 >= 2;
            long long mid_legs[3], out_legs[3];
            int pos3;  // gen-3 host position among its parent's state legs
            if (below_two) {
                pos3 = b2 - 2;
                int w = 0;
                for (int j = 0; j < 3; ++j) mid_legs[j] = (j == pos3) ? n3 : fr[3 + w++];
                const long long n2sum = mid_legs[0] + mid_legs[1] + mid_legs[2];
                w = 0;
                for (int j = 0; j < 3; ++j) out_legs[j] = (j == b1) ? n2sum : fr[5 + w++];
            } else {
                mid_legs[0] = fr[3];
                mid_legs[1] = fr[4];
                mid_legs[2] = fr[5];
                const long long n2sum = mid_legs[0] + mid_legs[1] + mid_legs[2];
                int free_pos[2], w = 0;
                for (int j = 0; j < 3; ++j)
                    if (j != b1) free_pos[w++] = j;
                pos3 = free_pos[b2];
                for (int j = 0; j < 3; ++j) out_legs[j] = fr[6];
                out_legs[b1] = n2sum;
                out_legs[pos3] = n3;
                out_legs[3 - b1 - pos3] = fr[6];
            }
            const long long n_root = out_legs[0] + out_legs[1] + out_legs[2];
            if (n_root < -N || n_root > N) continue;

            const long long phi1 = phi(n_root, out_legs[0], out_legs[1], out_legs[2]);
            const long long host2 = out_legs[b1];
            const long long phi2 = phi(host2, mid_legs[0], mid_legs[1], mid_legs[2]);
            const long long host3 = below_two ? mid_legs[pos3] : out_legs[pos3];
            const long long phi3 = phi(host3, m3[0], m3[1], m3[2]);
            const long long cum1 = phi1, cum2 = phi1 + phi2, cum3 = cum2 + phi3;
            if (!(static_cast<double>(std::llabs(cum1)) > M)) continue;
            if (!(std::llabs(cum2) > 2 * std::llabs(cum1))) continue;

            const auto& p1 = ids[static_cast<size_t>(i1)].pattern;
            const Slot host2_slot = p1[static_cast<size_t>(leg_to_slot[b1])];
            const bool star2 = host2_slot.kind == Slot::state_star;
            const auto p2 = slot_pattern({i2, star2});
            const Slot host3_slot =
                below_two ? p2[static_cast<size_t>(leg_to_slot[pos3])]
                          : p1[static_cast<size_t>(leg_to_slot[pos3])];
            const bool star3 = host3_slot.kind == Slot::state_star;
            const auto p3 = slot_pattern({i3, star3});

            const FreqTuple t1{out_legs[0], 0, out_legs[1], 0, out_legs[2]};
            const FreqTuple t2{mid_legs[0], 0, mid_legs[1], 0, mid_legs[2]};
            const FreqTuple t3{m3[0], 0, m3[1], 0, m3[2]};
            const double h1 = hat_multiplier({i1, false}, n_root, t1, s.eta, s.sigma);
            if (h1 == 0.0) continue;
            const double h2 = hat_multiplier({i2, star2}, host2, t2, s.eta, s.sigma);
            if (h2 == 0.0) continue;
            const double h3 = hat_multiplier({i3, star3}, host3, t3, s.eta, s.sigma);
            if (h3 == 0.0) continue;

            // legs: the state leaves not hosting a deeper node, plus weights
            cplx legs{1.0, 0.0};
            std::array<std::pair<const Slot*, long long>, 7> state_slots{};
            int ns = 0;
            for (int j = 0; j < 3; ++j) {
                if (j == b1) continue;
                if (!below_two && j == pos3) continue;
                state_slots[static_cast<size_t>(ns++)] = {
                    &p1[static_cast<size_t>(leg_to_slot[j])], out_legs[j]};
            }
            for (int j = 0; j < 3; ++j) {
                if (below_two && j == pos3) continue;
                state_slots[static_cast<size_t>(ns++)] = {
                    &p2[static_cast<size_t>(leg_to_slot[j])], mid_legs[j]};
            }
            for (int j = 0; j < 3; ++j)
                state_slots[static_cast<size_t>(ns++)] = {
                    &p3[static_cast<size_t>(leg_to_slot[j])], m3[j]};
            for (int j = 0; j < ns; ++j)
                legs *= state_leg(s, *state_slots[static_cast<size_t>(j)].first,
                                  state_slots[static_cast<size_t>(j)].second);
            const std::array<const std::array<Slot, 5>*, 3> pats{&p1, &p2, &p3};
            cplx wprod{1.0, 0.0};
            for (const auto* p : pats)
                wprod *= s.w0.at((*p)[1].k) * s.w0.at((*p)[3].k);

            const cplx mprod = complex_unit({i1, false}) * h1 *
                               complex_unit({i2, star2}) * h2 *
                               complex_unit({i3, star3}) * h3;
            const cplx phase = polar1(s.t * static_cast<double>(cum3));
            const cplx denom12 = cplx{0.0, static_cast<double>(cum1)} *
                                 cplx{0.0, static_cast<double>(cum2)};
            // N^{(3)}: sign +, weight 1/((i cum1)(i cum2))
            const cplx base3 = phase * mprod / denom12;
            const size_t bin = static_cast<size_t>(n_root + N);
            auto deposit = [&](int obj, cplx val) {
                a.sum[static_cast<size_t>(obj)][bin] += val;
                a.sum2[static_cast<size_t>(obj)][bin] += std::norm(val);
            };
            deposit(0, base3 * wprod * legs);

            // J=3 families split on |cum3| vs 2|cum2|
            if (std::llabs(cum3) <= 2 * std::llabs(cum2)) {
                deposit(2, base3 * wprod * legs);  // resonant
            } else {
                const cplx base0 = base3 / cplx{0.0, static_cast<double>(cum3)};
                deposit(1, base0 * wprod * legs);  // boundary, sign +
                // weight-derivative: product rule over the three weight pairs
                cplx dwsum{0.0, 0.0};
                for (const auto* p : pats) {
                    const cplx pair = s.w0.at((*p)[1].k) * s.w0.at((*p)[3].k);
                    const cplx dpair = s.dw0.at((*p)[1].k) * s.w0.at((*p)[3].k) +
                                       s.w0.at((*p)[1].k) * s.dw0.at((*p)[3].k);
                    dwsum += dpair * (wprod / pair);
                }
                deposit(3, -base0 * dwsum * legs);  // sign -
                // remainder substitution over the seven state leaves
                cplx rsum{0.0, 0.0};
                for (int j = 0; j < ns; ++j) {
                    cplx rest{1.0, 0.0};
                    for (int l = 0; l < ns; ++l) {
                        if (l == j) continue;
                        rest *= state_leg(s, *state_slots[static_cast<size_t>(l)].first,
                                          state_slots[static_cast<size_t>(l)].second);
                    }
                    rsum += sub_value(s.r0, *state_slots[static_cast<size_t>(j)].first,
                                      state_slots[static_cast<size_t>(j)].second) *
                            rest;
                }
                deposit(4, -base0 * wprod * rsum);  // sign -
            }
        }
    });

    auto finalize = [&](int obj) {
        McField out;
        out.mean = SpectralField(N, false);
        out.variance.assign(static_cast<size_t>(2 * N + 1), 0.0);
        out.samples = samples;
        const double inv = 1.0 / static_cast<double>(samples);
        for (int bin = 0; bin < 2 * N + 1; ++bin) {
            cplx sum{0.0, 0.0};
            double sum2 = 0.0;
            for (const auto& a : acc) {
                sum += a.sum[static_cast<size_t>(obj)][static_cast<size_t>(bin)];
                sum2 += a.sum2[static_cast<size_t>(obj)][static_cast<size_t>(bin)];
            }
            const cplx mean_f = sum * inv;
            out.mean.at(bin - N) = space * mean_f;
            const double var_f = std::max(0.0, sum2 * inv - std::norm(mean_f));
            out.variance[static_cast<size_t>(bin)] = space * space * var_f * inv;
        }
        return out;
    };

    McGeneration3 out;
    out.next_j2 = finalize(0);
    out.boundary = finalize(1);
    out.resonant = finalize(2);
    out.weight_dt = finalize(3);
    out.remainder = finalize(4);
    return out;
}

McField eval_n3_mc(const NfSample& s, double M, long long samples, uint64_t seed,
                   int threads) {
    return mc_generation3(s, M, samples, seed, threads).next_j2;
}

// ---------------------------------------------------------------------------
// dispatchers
// ---------------------------------------------------------------------------

SpectralField eval_term(const TermDescriptor& desc, const NfSample& s) {
    if (desc.J == 1) {
        const auto F = eval_families_j1(s, desc.M);
        switch (desc.family) {
            case Family::boundary: return F.boundary;
            case Family::resonant: return F.resonant;
            case Family::weight_dt: return F.weight_dt;
            case Family::remainder: return F.remainder;
            case Family::next: return F.next;
        }
    }
    if (desc.J == 2) {
        if (desc.family == Family::next)
            throw ModeUnsupported("eval_term: the J=2 tail requires Monte-Carlo mode");
        const auto F = eval_families_j2(s, desc.M);
        switch (desc.family) {
            case Family::boundary: return F.boundary;
            case Family::resonant: return F.resonant;
            case Family::weight_dt: return F.weight_dt;
            case Family::remainder: return F.remainder;
            default: break;
        }
    }
    if (desc.J == 3)
        throw ModeUnsupported("eval_term: J=3 requires Monte-Carlo mode");
    throw GenerationTooLarge("eval_term: exact evaluation supports J <= 2");
}

McField eval_term_mc(const TermDescriptor& desc, const NfSample& s, long long samples,
                     uint64_t seed, int threads) {
    if (desc.J == 2 && desc.family == Family::next)
        return eval_n3_mc(s, desc.M, samples, seed, threads);
    if (desc.J == 3) {
        const auto g3 = mc_generation3(s, desc.M, samples, seed, threads);
        switch (desc.family) {
            case Family::boundary: return g3.boundary;
            case Family::resonant: return g3.resonant;
            case Family::weight_dt: return g3.weight_dt;
            case Family::remainder: return g3.remainder;
            case Family::next:
                throw GenerationTooLarge("eval_term_mc: J=4 objects are out of range");
        }
    }
    throw ModeUnsupported("eval_term_mc: requested object has an exact evaluator");
}

// ---------------------------------------------------------------------------
// telescoping and decay
// ---------------------------------------------------------------------------

namespace {

// composite trapezoid of per-sample fields
SpectralField trapezoid(const std::vector<double>& times,
                        const std::vector<SpectralField>& vals, size_t stride = 1) {
    SpectralField acc(vals.front().n_max(), false);
    size_t prev = 0;
    for (size_t k = stride; k < vals.size(); k += stride) {
        const double h = times[k] - times[prev];
        auto mid = vals[prev] + vals[k];
        mid *= cplx{0.5 * h, 0.0};
        acc += mid;
        prev = k;
    }
    return acc;
}

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    const size_t K = times.size();
    std::vector<double> w(K, 0.0);
    for (size_t k = 0; k + 1 < K; ++k) {
        const double h = times[k + 1] - times[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

TelescopingReport telescoping_check(int J, const std::vector<NfSample>& samples,
                                    double M, double s, long long mc_samples,
                                    uint64_t seed) {
    if (J < 1 || J > 2) throw GenerationTooLarge("telescoping_check: J must be 1 or 2");
    if (samples.size() < 2) throw ConfigInvalid("telescoping_check: need >= 2 samples");
    const int N = samples.front().u.n_max();
    const size_t K = samples.size();

    std::vector<double> times(K);
    std::vector<SpectralField> integrand(K, SpectralField(N)), r_int(K, SpectralField(N)),
        tail(K, SpectralField(N));
    SpectralField boundary_first(N), boundary_last(N);

    TelescopingReport rep;
    rep.J = J;
    std::vector<double> mc_err(K, 0.0);

    for (size_t k = 0; k < K; ++k) {
        const auto& smp = samples[k];
        times[k] = smp.t;
        const auto F1 = eval_families_j1(smp, M);
        SpectralField integ = F1.resonant + F1.weight_dt;
        SpectralField rsum = smp.r0 + F1.remainder;
        SpectralField tl = F1.next;
        SpectralField bnd = F1.boundary;
        if (J == 2) {
            const auto F2 = eval_families_j2(smp, M);
            integ += F2.resonant + F2.weight_dt;
            rsum += F2.remainder;
            bnd += F2.boundary;
            const auto mc = eval_n3_mc(smp, M, mc_samples > 0 ? mc_samples : 200000,
                                       seed + static_cast<uint64_t>(k));
            tl = mc.mean;
            mc_err[k] = mc.norm_error(s);
        }
        integrand[k] = integ;
        r_int[k] = rsum;
        tail[k] = tl;
        if (k == 0) boundary_first = bnd;
        if (k + 1 == K) boundary_last = bnd;
    }

    const auto I1 = trapezoid(times, integrand);
    const auto IR = trapezoid(times, r_int);
    const auto IT = trapezoid(times, tail);

    SpectralField lhs = samples.back().ts.omega - samples.front().ts.omega;
    SpectralField rhs = boundary_last - boundary_first;
    rhs += I1;
    rhs += IR;
    rhs += IT;

    rep.lhs_increment = sobolev_norm(lhs, s);
    rep.residual = sobolev_norm(lhs - rhs, s);
    rep.integral_norms["boundary_jump"] = sobolev_norm(boundary_last - boundary_first, s);
    rep.integral_norms["resonant_plus_weight_dt"] = sobolev_norm(I1, s);
    rep.integral_norms["remainders"] = sobolev_norm(IR, s);
    rep.integral_norms["tail"] = sobolev_norm(IT, s);
    if (J == 2) {
        // MC tails at distinct samples are independent draws
        const auto w = trapezoid_weights(times);
        double var = 0.0;
        for (size_t k = 0; k < K; ++k) var += w[k] * w[k] * mc_err[k] * mc_err[k];
        rep.mc_error = std::sqrt(var);
    }

    if (K >= 5 && (K - 1) % 2 == 0) {
        const auto I1c = trapezoid(times, integrand, 2);
        const auto IRc = trapezoid(times, r_int, 2);
        const auto ITc = trapezoid(times, tail, 2);
        rep.quad_error_est = sobolev_norm((I1c - I1) + (IRc - IR) + (ITc - IT), s);
    }
    return rep;
}

DecayReport decay_scan(const std::vector<NfSample>& samples,
                       const std::vector<double>& Ms, double s) {
    DecayReport rep;
    const std::array<const char*, 4> fams{"N0", "NR", "N1", "R"};
    std::map<std::string, std::map<double, double>> sup1, sup2;
    for (const auto& smp : samples) {
        const auto kernels = make_j2_kernels(smp);
        for (double M : Ms) {
            const auto F1 = eval_families_j1(smp, M);
            const auto F2 = eval_families_j2(smp, M, kernels);
            auto upd = [&](const char* nm, const SpectralField& f1,
                           const SpectralField& f2) {
                auto& a = sup1[nm][M];
                auto& b = sup2[nm][M];
                a = std::max(a, sobolev_norm(f1, s));
                b = std::max(b, sobolev_norm(f2, s));
            };
            upd("N0", F1.boundary, F2.boundary);
            upd("NR", F1.resonant, F2.resonant);
            upd("N1", F1.weight_dt, F2.weight_dt);
            upd("R", F1.remainder, F2.remainder);
        }
    }
    for (const auto* nm : fams) {
        std::vector<std::pair<double, double>> pts;
        for (double M : Ms) {
            rep.rows.push_back({nm, 1, M, sup1[nm][M]});
            rep.rows.push_back({nm, 2, M, sup2[nm][M]});
            if (sup1[nm][M] > 0.0)
                pts.push_back({std::log(M), std::log(sup2[nm][M] / sup1[nm][M])});
        }
        if (pts.size() < 2) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double npts = static_cast<double>(pts.size());
        rep.fitted_exponent[nm] =
            (npts * sxy - sx * sy) / std::max(1e-300, npts * sxx - sx * sx);
        rep.ratio_at_mid_M[nm] = std::exp(pts[pts.size() / 2].second);
    }
    return rep;
}

double choose_M(const std::vector<NfSample>& samples, double s, double M_cap) {
    for (double M = 2.0; M <= M_cap; M *= 2.0) {
        double sup1 = 0.0, sup2 = 0.0;
        for (const auto& smp : samples) {
            const auto F1 = eval_families_j1(smp, M);
            const auto F2 = eval_families_j2(smp, M);
            sup1 = std::max(sup1, sobolev_norm(F1.boundary, s));
            sup2 = std::max(sup2, sobolev_norm(F2.boundary, s));
        }
        if (sup1 > 0.0 && sup2 / sup1 < 0.5) return M;
    }
    return M_cap;
}

}  // namespace mbo
