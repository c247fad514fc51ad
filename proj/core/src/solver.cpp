#include "mbo/solver.hpp"

#include <cmath>
#include <numbers>

#include "mbo/errors.hpp"

namespace mbo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Nonlinear part only; the linear flow is handled by the integrating factor.
SpectralField nonlinearity(const SpectralField& u, int sigma, Equation eq,
                           ProductMode mode) {
    // sigma u^2 dx u, or 2 sigma P_{!=c}(u^2) dx u for the de-meaned form.
    // Either way the zero mode vanishes identically (the integrand is a
    // perfect derivative and dx u is band-limited), so after checking the
    // rounding residue we pin it to exactly zero; the spatial mean is then
    // bitwise constant in time.
    const double sg = static_cast<double>(sigma);
    SpectralField out(u.n_max(), u.is_real());
    if (eq == Equation::mbo) {
        const auto u2 = product(u, u, mode);
        out = product(u2, dx(u), mode);
        out *= cplx{sg, 0.0};
    } else {
        const auto q = project(product(u, u, mode), Projection::non_mean);
        out = product(q, dx(u), mode);
        out *= cplx{2.0 * sg, 0.0};
    }
    const double scale = std::max(1.0, out.l2());
    if (std::abs(out(0)) > 1e-10 * scale)
        throw InvariantViolation("nonlinearity: zero mode failed to vanish");
    out.at(0) = cplx{0.0, 0.0};
    return out;
}

// phase n|n| of the linear multiplier
inline double linear_phase(int n) {
    return static_cast<double>(n) * std::abs(static_cast<double>(n));
}

SpectralField twist_field(const SpectralField& f, double tau, double sign) {
    SpectralField out(f.n_max(), false);
    for (int n = -f.n_max(); n <= f.n_max(); ++n) {
        const double ph = sign * tau * linear_phase(n);
        out.at(n) = f(n) * cplx{std::cos(ph), std::sin(ph)};
    }
    out.set_is_real(f.is_real());
    return out;
}

}  // namespace

SpectralField rhs_mbo_prime(const SpectralField& u, int sigma, ProductMode mode) {
    // -H dx^2 u has symbol -i n|n|
    SpectralField lin(u.n_max(), u.is_real());
    for (int n = -u.n_max(); n <= u.n_max(); ++n)
        lin.at(n) = cplx{0.0, -linear_phase(n)} * u(n);
    auto out = nonlinearity(u, sigma, Equation::mbo_prime, mode);
    out += lin;
    out.set_is_real(u.is_real());
    return out;
}

ConservedTriple conserved(const SpectralField& u, int sigma, ProductMode mode) {
    ConservedTriple c;
    c.mean = u(0).real();
    double mass = 0.0, quad = 0.0;
    for (int n = -u.n_max(); n <= u.n_max(); ++n) {
        mass += std::norm(u(n));
        quad += std::abs(static_cast<double>(n)) * std::norm(u(n));
    }
    c.mass_l2 = kTwoPi * mass;
    const auto u2 = product(u, u, mode);
    const auto u4 = product(u2, u2, mode);
    c.energy = 0.5 * kTwoPi * quad -
               static_cast<double>(sigma) / 12.0 * kTwoPi * u4(0).real();
    return c;
}

SpectralField step(const SpectralField& u, double dt, int sigma, Equation eq,
                   ProductMode mode) {
    if (!(dt > 0.0)) throw ConfigInvalid("step: dt must be positive");
    // Lawson RK4 for w(tau) = e^{i tau n|n|} F u(t+tau):
    //   dw/dtau = e^{i tau n|n|} N(e^{-i tau n|n|} w).
    const auto f = [&](const SpectralField& w, double tau) {
        return twist_field(nonlinearity(twist_field(w, tau, -1.0), sigma, eq, mode),
                           tau, +1.0);
    };
    const SpectralField& w0 = u;
    const auto k1 = f(w0, 0.0);
    auto w = w0;
    {
        auto tmp = k1;
        tmp *= cplx{0.5 * dt, 0.0};
        w += tmp;
    }
    const auto k2 = f(w, 0.5 * dt);
    w = w0;
    {
        auto tmp = k2;
        tmp *= cplx{0.5 * dt, 0.0};
        w += tmp;
    }
    const auto k3 = f(w, 0.5 * dt);
    w = w0;
    {
        auto tmp = k3;
        tmp *= cplx{dt, 0.0};
        w += tmp;
    }
    const auto k4 = f(w, dt);

    SpectralField wn = w0;
    for (int n = -u.n_max(); n <= u.n_max(); ++n)
        wn.at(n) += dt / 6.0 * (k1(n) + 2.0 * k2(n) + 2.0 * k3(n) + k4(n));
    auto out = twist_field(wn, dt, -1.0);
    out.set_is_real(u.is_real());
    return out;
}

Trajectory integrate(const SpectralField& u0, double T, const StepConfig& cfg,
                     int stride) {
    if (!(cfg.dt > 0.0) || !(T >= 0.0)) throw ConfigInvalid("integrate: bad dt or T");
    if (cfg.sigma != 1 && cfg.sigma != -1) throw ConfigInvalid("integrate: sigma must be +-1");

    Trajectory traj;
    traj.sigma = cfg.sigma;
    traj.dt = cfg.dt;
    traj.scheme_id = cfg.equation == Equation::mbo ? "rk4-twisted-mbo" : "rk4-twisted";

    const auto steps = static_cast<long long>(std::llround(T / cfg.dt));
    const double initial_l2 = std::max(u0.l2(), 1e-300);

    SpectralField u = u0;
    traj.times.push_back(0.0);
    traj.states.push_back(u);
    for (long long k = 1; k <= steps; ++k) {
        u = step(u, cfg.dt, cfg.sigma, cfg.equation, cfg.mode);
        if (u.is_real()) {
            if (u.conj_symmetry_defect() > 1e-10 * std::max(1.0, u.max_abs()))
                throw InvariantViolation("integrate: real symmetry lost");
            u.symmetrize_real();
        }
        if (u.l2() > cfg.blowup_factor * initial_l2)
            throw BlowupDetected("integrate: l2 norm exceeded " +
                                 std::to_string(cfg.blowup_factor) + " x initial");
        if (k % stride == 0 || k == steps) {
            traj.times.push_back(static_cast<double>(k) * cfg.dt);
            traj.states.push_back(u);
        }
    }
    return traj;
}

Trajectory mbo_to_mbo_prime(const Trajectory& traj, ProductMode mode) {
    Trajectory out;
    out.sigma = traj.sigma;
    out.dt = traj.dt;
    out.scheme_id = traj.scheme_id + "+gauge-shift";
    out.times = traj.times;
    out.states.reserve(traj.states.size());

    // shift(t) = sigma \int_0^t P_c(u(s)^2) ds by cumulative trapezoid
    std::vector<double> pc(traj.states.size());
    for (size_t k = 0; k < traj.states.size(); ++k) {
        const auto u2 = product(traj.states[k], traj.states[k], mode);
        pc[k] = u2(0).real();
    }
    const double amp = 1.0 / std::sqrt(2.0);
    double shift = 0.0;
    for (size_t k = 0; k < traj.states.size(); ++k) {
        if (k > 0)
            shift += 0.5 * (traj.times[k] - traj.times[k - 1]) * (pc[k] + pc[k - 1]) *
                     static_cast<double>(traj.sigma);
        const auto& u = traj.states[k];
        SpectralField v(u.n_max(), true);
        for (int n = -u.n_max(); n <= u.n_max(); ++n) {
            const double ph = -static_cast<double>(n) * shift;
            v.at(n) = amp * u(n) * cplx{std::cos(ph), std::sin(ph)};
        }
        out.states.push_back(std::move(v));
    }
    return out;
}

TwinProbeReport twin_probe(const SpectralField& u0, const StepConfig& a,
                           const StepConfig& b, double T, double s) {
    TwinProbeReport rep;
    const auto ta = integrate(u0, T, a, 1);
    const auto tb = integrate(u0, T, b, 1);

    // compare on the coarse sample times
    const double ratio = a.dt / b.dt;
    for (size_t k = 0; k < ta.samples(); ++k) {
        const auto kb = static_cast<size_t>(std::llround(static_cast<double>(k) * ratio));
        if (kb >= tb.samples()) break;
        const double d = sobolev_norm(ta.states[k] - tb.states[kb], s);
        rep.times.push_back(ta.times[k]);
        rep.divergence_by_time.push_back(d);
        rep.divergence = std::max(rep.divergence, d);
    }

    // Richardson error estimates: err(h) ~ ||u_h - u_{h/2}|| * 16/15 for a
    // fourth-order scheme.
    StepConfig half = b;
    half.dt = 0.5 * b.dt;
    const auto tc = integrate(u0, T, half, 1);
    double dab = 0.0, dbc = 0.0;
    for (size_t k = 0; k < ta.samples(); ++k) {
        const auto kb = static_cast<size_t>(std::llround(static_cast<double>(k) * ratio));
        const auto kc = static_cast<size_t>(
            std::llround(static_cast<double>(k) * a.dt / half.dt));
        if (kb >= tb.samples() || kc >= tc.samples()) break;
        dab = std::max(dab, sobolev_norm(ta.states[k] - tb.states[kb], s));
        dbc = std::max(dbc, sobolev_norm(tb.states[kb] - tc.states[kc], s));
    }
    rep.est_err_coarse = dab * 16.0 / 15.0;
    rep.est_err_fine = dbc * 16.0 / 15.0;
    return rep;
}

}  // namespace mbo
