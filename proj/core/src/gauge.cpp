#include "mbo/gauge.hpp"

#include <cmath>

#include "mbo/errors.hpp"
#include "mbo/fft.hpp"

namespace mbo {

namespace {

SpectralField constant_field(int n_max, cplx value) {
    SpectralField f(n_max, value.imag() == 0.0);
    f.at(0) = value;
    return f;
}

SpectralField scaled(SpectralField f, cplx a) { return f *= a; }

}  // namespace

SpectralField gauge_F(const SpectralField& u, ProductMode mode) {
    auto q = project(product(u, u, mode), Projection::non_mean);
    auto F = inv_dx(q);
    F.set_is_real(true);
    return F;
}

SpectralField gauge_exp(const SpectralField& u, int k, int sigma, ProductMode mode) {
    const auto F = gauge_F(u, mode);
    const int N = u.n_max();
    const int L = next_pow2(4 * (2 * N + 1));
    const auto Fx = grid_values(F, L);
    std::vector<cplx> ex(Fx.size());
    const double kk = static_cast<double>(k) * static_cast<double>(sigma);
    for (size_t j = 0; j < Fx.size(); ++j) {
        // F is real; exponentiate the real part to keep |e^{ikF}| = 1 exactly
        const double ph = kk * Fx[j].real();
        ex[j] = cplx{std::cos(ph), std::sin(ph)};
    }
    return field_from_grid(ex, N, false);
}

GaugeWeights make_gauge_weights(const SpectralField& u, int sigma, ProductMode mode) {
    GaugeWeights gw;
    gw.F_field = gauge_F(u, mode);
    gw.nu = u(0).real();
    gw.sigma = sigma;
    for (int k : {1, -1, 3, -3}) gw.exps.emplace(k, gauge_exp(u, k, sigma, mode));
    return gw;
}

GaugeTransformResult gauge_transform(const SpectralField& u, int sigma, ProductMode mode) {
    GaugeTransformResult r;
    r.nu = u(0).real();
    const auto em = gauge_exp(u, -1, sigma, mode);
    auto p = project(u, Projection::plus);
    p += constant_field(u.n_max(), cplx{0.5 * r.nu, 0.0});
    r.v = product(em, p, mode);
    return r;
}

SpectralField bilinear_B(const SpectralField& f, const SpectralField& g, ProductMode mode) {
    require_same_window(f, g, "bilinear_B");
    const auto fp = project(dx(f), Projection::plus);
    const auto gp = project(dx(g), Projection::plus);
    const auto fm = project(dx(f), Projection::minus);
    const auto gm = project(dx(g), Projection::minus);
    auto arg = product(fp, gp, mode) - product(fm, gm, mode);
    // (P_+ dx f)(P_+ dx g) has only positive modes, the minus piece only
    // negative ones, so the mean vanishes; inv_dx asserts it.
    return inv_dx(arg);
}

std::array<SpectralField, 9> remainder_R_terms(const SpectralField& u, int sigma,
                                               ProductMode mode) {
    const int N = u.n_max();
    const double sg = static_cast<double>(sigma);
    const double nu = u(0).real();

    const auto W = gauge_exp(u, -1, sigma, mode);  // e^{-i sigma F}
    const auto q = project(product(u, u, mode), Projection::non_mean);
    auto P = project(u, Projection::plus);
    P += constant_field(N, cplx{0.5 * nu, 0.0});

    const auto q2 = product(q, q, mode);
    const auto du = dx(u);
    const auto Hdu = hilbert(du);
    const auto qdu = product(q, du, mode);
    const double pc_u2 = product(u, u, mode)(0).real();

    std::array<SpectralField, 9> t{};

    // -i W P_{!=c}[q^2] P
    t[0] = scaled(product(product(W, project(q2, Projection::non_mean), mode), P, mode),
                  cplx{0.0, -1.0});
    // -H[ W q^2 P ]
    t[1] = scaled(hilbert(product(product(W, q2, mode), P, mode)), cplx{-1.0, 0.0});
    // -2 sigma P_c(u i H dx u) W P
    {
        const cplx pc = cplx{0.0, 1.0} * product(u, Hdu, mode)(0);
        t[2] = scaled(product(W, P, mode), -2.0 * sg * pc);
    }
    // +2 sigma P_c[ W u P i H dx u ]
    {
        const auto inner = product(product(product(W, u, mode), P, mode), Hdu, mode);
        t[3] = constant_field(N, 2.0 * sg * cplx{0.0, 1.0} * inner(0));
    }
    // +2 sigma (P_c + P_-)[ W P_+(q dx u) ]
    {
        const auto a = product(W, project(qdu, Projection::plus), mode);
        t[4] = scaled(project(a, Projection::minus) + project(a, Projection::mean),
                      cplx{2.0 * sg, 0.0});
    }
    // -2 sigma P_+[ W (P_c + P_-)(q dx u) ]
    {
        const auto pcm = project(qdu, Projection::minus) + project(qdu, Projection::mean);
        t[5] = scaled(project(product(W, pcm, mode), Projection::plus), cplx{-2.0 * sg, 0.0});
    }
    // -2 sigma P_c(u^2) ( P_+[W dx P_- u] + P_-[W dx P_+ u] )
    {
        const auto a = project(product(W, dx(project(u, Projection::minus)), mode),
                               Projection::plus);
        const auto b = project(product(W, dx(project(u, Projection::plus)), mode),
                               Projection::minus);
        t[6] = scaled(a + b, cplx{-2.0 * sg * pc_u2, 0.0});
    }
    // +i P_c[ W P_+ dx^2 u ]
    {
        const auto inner = product(W, dx2(project(u, Projection::plus)), mode);
        t[7] = constant_field(N, cplx{0.0, 1.0} * inner(0));
    }
    // -2 sigma P_c(u^2) P_-[ inv_dx(P_- W) dx^2 P_+ u ]
    {
        const auto a = inv_dx(project(W, Projection::minus));
        const auto inner = product(a, dx2(project(u, Projection::plus)), mode);
        t[8] = scaled(project(inner, Projection::minus), cplx{-2.0 * sg * pc_u2, 0.0});
    }
    return t;
}

SpectralField remainder_R(const SpectralField& u, int sigma, ProductMode mode) {
    auto terms = remainder_R_terms(u, sigma, mode);
    SpectralField out(u.n_max(), false);
    for (const auto& t : terms) out += t;
    return out;
}

SpectralField rhs_v_pre_substitution(const SpectralField& u, int sigma, ProductMode mode) {
    const int N = u.n_max();
    const double sg = static_cast<double>(sigma);
    const double nu = u(0).real();

    const auto W = gauge_exp(u, -1, sigma, mode);
    auto P = project(u, Projection::plus);
    P += constant_field(N, cplx{0.5 * nu, 0.0});

    const auto u2 = product(u, u, mode);
    const auto dPm = dx(project(u, Projection::minus));
    const auto dPp = dx(project(u, Projection::plus));

    // -4s P_+[ W u P dx P_- u ] + 4s P_-[ W u P dx P_+ u ]
    const auto WuP = product(product(W, u, mode), P, mode);
    auto out = scaled(project(product(WuP, dPm, mode), Projection::plus), cplx{-4.0 * sg, 0.0});
    out += scaled(project(product(WuP, dPp, mode), Projection::minus), cplx{4.0 * sg, 0.0});
    // +2s P_+[ W u^2 dx P_- u ]
    const auto Wu2 = product(W, u2, mode);
    out += scaled(project(product(Wu2, dPm, mode), Projection::plus), cplx{2.0 * sg, 0.0});
    // +2s dx P_-[ inv_dx(P_-(W u^2)) dx P_+ u ]
    {
        const auto a = inv_dx(project(Wu2, Projection::minus));
        out += scaled(dx(project(product(a, dPp, mode), Projection::minus)),
                      cplx{2.0 * sg, 0.0});
    }
    // -2s W P B(u,u)
    out += scaled(product(product(W, P, mode), bilinear_B(u, u, mode), mode),
                  cplx{-2.0 * sg, 0.0});
    out += remainder_R(u, sigma, mode);
    return out;
}

SpectralField rhs_v(const SpectralField& u, const SpectralField& v, double nu, int sigma,
                    ProductMode mode, double tol) {
    require_same_window(u, v, "rhs_v");
    (void)nu;  // enters through v = e^{-i sigma F}(P_+ u + nu/2)
    const double sg = static_cast<double>(sigma);

    const auto E1 = gauge_exp(u, 1, sigma, mode);
    const auto Em1 = gauge_exp(u, -1, sigma, mode);
    const auto Em3 = gauge_exp(u, -3, sigma, mode);
    const auto vb = conj_field(v);

    // reconstruction identity u = E1 v + Em1 conj(v)
    {
        const auto rec = product(E1, v, mode) + product(Em1, vb, mode);
        const double scale = std::max(1.0, u.l2());
        if ((rec - u).l2() > tol * scale)
            throw InconsistentPair("rhs_v: reconstruction identity violated");
    }

    const auto E1v = product(E1, v, mode);
    const auto Em1vb = product(Em1, vb, mode);
    const auto dPpE1v = dx(project(E1v, Projection::plus));
    const auto dPmEm1vb = dx(project(Em1vb, Projection::minus));

    const auto v2 = product(v, v, mode);
    const auto vvb = product(v, vb, mode);
    const auto vb2 = product(vb, vb, mode);

    const auto E1v2 = product(E1, v2, mode);
    const auto Em1vvb = product(Em1, vvb, mode);
    const auto Em3vb2 = product(Em3, vb2, mode);

    // -2s P_+[E1 v^2 dx P_-(Em1 vb)] + 2s P_+[Em3 vb^2 dx P_-(Em1 vb)]
    auto out = scaled(project(product(E1v2, dPmEm1vb, mode), Projection::plus),
                      cplx{-2.0 * sg, 0.0});
    out += scaled(project(product(Em3vb2, dPmEm1vb, mode), Projection::plus),
                  cplx{2.0 * sg, 0.0});
    // +4s P_-[E1 v^2 dx P_+(E1 v)] + 4s P_-[Em1 v vb dx P_+(E1 v)]
    out += scaled(project(product(E1v2, dPpE1v, mode), Projection::minus),
                  cplx{4.0 * sg, 0.0});
    out += scaled(project(product(Em1vvb, dPpE1v, mode), Projection::minus),
                  cplx{4.0 * sg, 0.0});
    // +2s dx P_-[ inv_dx(P_-(E1 v^2 + 2 Em1 v vb + Em3 vb^2)) dx P_+(E1 v) ]
    {
        auto g = E1v2;
        g += scaled(Em1vvb, cplx{2.0, 0.0});
        g += Em3vb2;
        const auto a = inv_dx(project(g, Projection::minus));
        out += scaled(dx(project(product(a, dPpE1v, mode), Projection::minus)),
                      cplx{2.0 * sg, 0.0});
    }
    // -2s v inv_dx[(dx P_+(E1 v))^2] + 2s v inv_dx[(dx P_-(Em1 vb))^2]
    out += scaled(product(v, inv_dx(product(dPpE1v, dPpE1v, mode)), mode),
                  cplx{-2.0 * sg, 0.0});
    out += scaled(product(v, inv_dx(product(dPmEm1vb, dPmEm1vb, mode)), mode),
                  cplx{2.0 * sg, 0.0});

    out += remainder_R(u, sigma, mode);
    return out;
}

SpectralField dt_gauge_exp(const GaugeWeights& gw, const SpectralField& u, int k,
                           ProductMode mode) {
    const double sg = static_cast<double>(gw.sigma);
    const auto q = project(product(u, u, mode), Projection::non_mean);
    auto drift = scaled(project(product(u, hilbert(dx(u)), mode), Projection::non_mean),
                        cplx{-2.0, 0.0});
    drift += scaled(bilinear_B(u, u, mode), cplx{0.0, -2.0});
    drift += scaled(project(product(q, q, mode), Projection::non_mean), cplx{sg, 0.0});
    return scaled(product(gw.exp(k), drift, mode),
                  cplx{0.0, static_cast<double>(k) * sg});
}

SpectralField dt_gauge_exp(const SpectralField& u, int k, int sigma, ProductMode mode) {
    return dt_gauge_exp(make_gauge_weights(u, sigma, mode), u, k, mode);
}

LipschitzReport lipschitz_probe(const Trajectory& a, const Trajectory& b, double s,
                                ProductMode mode) {
    LipschitzReport rep;
    const size_t n = std::min(a.samples(), b.samples());
    std::vector<double> du(n), dv(n);
    for (size_t k = 0; k < n; ++k) {
        du[k] = sobolev_norm(a.states[k] - b.states[k], s);
        const auto va = gauge_transform(a.states[k], a.sigma, mode);
        const auto vb = gauge_transform(b.states[k], b.sigma, mode);
        dv[k] = sobolev_norm(va.v - vb.v, s);
    }
    const double du0 = du.empty() ? 0.0 : du[0];

    double sup_u = 0.0, sup_v = 0.0;
    for (size_t k = 0; k < n; ++k) {
        sup_u = std::max(sup_u, du[k]);
        sup_v = std::max(sup_v, dv[k]);
        const double denom = du0 + sup_v;
        rep.horizons.push_back(a.times[k]);
        rep.ratio_by_horizon.push_back(denom > 0.0 ? sup_u / denom : 0.0);
    }
    const double denom = du0 + sup_v;
    if (denom <= 0.0) {
        rep.degenerate = true;
        rep.ratio = 0.0;
    } else {
        rep.ratio = sup_u / denom;
    }
    return rep;
}

}  // namespace mbo
