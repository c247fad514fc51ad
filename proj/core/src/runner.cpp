#include "mbo/runner.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mbo/counting.hpp"
#include "mbo/errors.hpp"
#include "mbo/estimates.hpp"
#include "mbo/gauge.hpp"
#include "mbo/normal_form.hpp"
#include "mbo/parallel.hpp"
#include "mbo/random.hpp"
#include "mbo/report.hpp"
#include "mbo/solver.hpp"

namespace mbo {

namespace {

nlohmann::json datum_to_json(const DatumSpec& d) {
    return {{"type", d.type}, {"a", d.a},       {"b", d.b},
            {"decay", d.decay}, {"amplitude", d.amplitude}};
}

DatumSpec datum_from_json(const nlohmann::json& j) {
    DatumSpec d;
    d.type = j.value("type", d.type);
    d.a = j.value("a", d.a);
    d.b = j.value("b", d.b);
    d.decay = j.value("decay", d.decay);
    d.amplitude = j.value("amplitude", d.amplitude);
    return d;
}

}  // namespace

std::string RunConfig::to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["n_max"] = n_max;
    j["dt"] = dt;
    j["T"] = T;
    j["sigma"] = sigma;
    j["s"] = s;
    j["eta"] = eta;
    j["M"] = M;
    j["delta"] = delta;
    j["seed"] = seed;
    j["threads"] = threads;
    j["datum"] = datum_to_json(datum);
    j["equation"] = equation;
    j["stride"] = stride;
    j["input"] = input;
    j["report"] = report;
    j["out_dir"] = out_dir;
    j["J"] = J;
    j["mode"] = mode;
    j["samples"] = samples;
    j["estimate_id"] = estimate_id_str;
    j["sizes"] = sizes;
    j["trials"] = trials;
    j["curve"] = curve;
    j["rmax"] = rmax;
    return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    RunConfig c;
    c.subcommand = j.value("subcommand", c.subcommand);
    c.n_max = j.value("n_max", c.n_max);
    c.dt = j.value("dt", c.dt);
    c.T = j.value("T", c.T);
    c.sigma = j.value("sigma", c.sigma);
    c.s = j.value("s", c.s);
    c.eta = j.value("eta", c.eta);
    c.M = j.value("M", c.M);
    c.delta = j.value("delta", c.delta);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (j.contains("datum")) c.datum = datum_from_json(j.at("datum"));
    c.equation = j.value("equation", c.equation);
    c.stride = j.value("stride", c.stride);
    c.input = j.value("input", c.input);
    c.report = j.value("report", c.report);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.J = j.value("J", c.J);
    c.mode = j.value("mode", c.mode);
    c.samples = j.value("samples", c.samples);
    c.estimate_id_str = j.value("estimate_id", c.estimate_id_str);
    c.sizes = j.value("sizes", c.sizes);
    c.trials = j.value("trials", c.trials);
    c.curve = j.value("curve", c.curve);
    c.rmax = j.value("rmax", c.rmax);
    return c;
}

std::string RunConfig::config_hash() const { return hex16(fnv1a64(to_json())); }

SpectralField make_datum(const DatumSpec& d, int n_max, uint64_t seed) {
    if (d.type == "two_mode") {
        SpectralField u(n_max, true);
        u.at(1) = cplx{0.5 * d.a, 0.0};
        u.at(-1) = cplx{0.5 * d.a, 0.0};
        if (n_max >= 2) {
            u.at(2) = cplx{0.5 * d.b, 0.0};
            u.at(-2) = cplx{0.5 * d.b, 0.0};
        }
        return u;
    }
    if (d.type == "colored") {
        Rng rng(seed, 7);
        return random_real_field(n_max, rng, d.decay, d.amplitude);
    }
    throw ConfigInvalid("unknown datum type: " + d.type);
}

namespace {

void validate(const RunConfig& c) {
    if (c.n_max < 2 || c.n_max > 4096) throw ConfigInvalid("n_max out of range");
    if (!(c.dt > 0.0)) throw ConfigInvalid("dt must be positive");
    if (!(c.T >= 0.0)) throw ConfigInvalid("T must be nonnegative");
    if (c.sigma != 1 && c.sigma != -1) throw ConfigInvalid("sigma must be +1 or -1");
    if (!(c.eta > 0.0 && c.eta < 1.0)) throw ConfigInvalid("eta must lie in (0,1)");
    if (c.M != 0.0 && !(c.M > 1.0)) throw ConfigInvalid("M must exceed 1");
    if (c.subcommand == "verify-estimates" || c.subcommand == "gauge-check" ||
        c.subcommand == "nf-expand") {
        if (!(c.s > 0.5)) throw ConfigInvalid("s must exceed 1/2");
    }
    if (c.subcommand == "nf-expand") {
        if (c.J < 1 || c.J > 3) throw ConfigInvalid("J must be 1, 2, or 3");
        if (c.mode != "exact" && c.mode != "mc") throw ConfigInvalid("mode must be exact|mc");
        if (c.J == 3 && c.mode != "mc") throw ConfigInvalid("J=3 requires --mode mc");
    }
    if (c.subcommand == "count-lemma") {
        if (c.curve != "ellipse" && c.curve != "hyperbola")
            throw ConfigInvalid("curve must be ellipse|hyperbola");
        if (c.rmax < 2 || c.rmax > (1LL << 12)) throw ConfigInvalid("rmax out of range");
    }
    if (c.trials < 1) throw ConfigInvalid("trials must be positive");
}

std::string report_path(const RunConfig& c, const std::string& ext) {
    if (!c.report.empty()) return c.report;
    return c.out_dir + "/" + c.subcommand + "-" + c.config_hash() + "." + ext;
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw ConfigInvalid("empty size list");
    return out;
}

nlohmann::json report_envelope(const RunConfig& c) {
    nlohmann::json j;
    j["config_hash"] = c.config_hash();
    j["parameters"] = {{"eta", c.eta}, {"M", c.M}, {"s", c.s},
                       {"delta", c.delta}, {"seed", c.seed}};
    return j;
}

int run_simulate(const RunConfig& c) {
    const auto u0 = make_datum(c.datum, c.n_max, c.seed);
    StepConfig sc;
    sc.dt = c.dt;
    sc.sigma = c.sigma;
    sc.equation = c.equation == "mbo" ? Equation::mbo : Equation::mbo_prime;
    const auto traj = integrate(u0, c.T, sc, c.stride);
    std::vector<ConservedTriple> cons;
    cons.reserve(traj.samples());
    for (size_t k = 0; k < traj.samples(); ++k)
        cons.push_back(conserved(traj.states[k], c.sigma));
    const auto traj_path = report_path(c, "jsonl");
    save_trajectory(traj, traj_path);
    save_conserved_csv(traj, cons, c.out_dir + "/" + c.subcommand + "-" +
                                       c.config_hash() + "-conserved.csv");
    const auto& first = cons.front();
    const auto& last = cons.back();
    std::cout << "simulate: " << traj.samples() << " samples to t=" << traj.times.back()
              << "  mean drift=" << std::abs(last.mean - first.mean)
              << "  l2 drift=" << std::abs(last.mass_l2 - first.mass_l2)
              << "  energy drift=" << std::abs(last.energy - first.energy) << "\n"
              << "trajectory: " << traj_path << "\n";
    return 0;
}

int run_gauge_check(const RunConfig& c) {
    if (c.input.empty()) throw ConfigInvalid("gauge-check needs --input");
    const auto traj = load_trajectory(c.input);
    if (traj.samples() < 3) throw ConfigInvalid("gauge-check needs >= 3 samples");
    std::vector<LongRow> rows;
    const double dt = traj.times[1] - traj.times[0];
    for (size_t k = 1; k + 1 < traj.samples(); ++k) {
        const auto& u = traj.states[k];
        const auto gt = gauge_transform(u, traj.sigma);
        const auto gm = gauge_transform(traj.states[k - 1], traj.sigma);
        const auto gp = gauge_transform(traj.states[k + 1], traj.sigma);
        SpectralField dv = gp.v - gm.v;
        dv *= cplx{1.0 / (2.0 * dt), 0.0};
        const auto lhs = dv + hilbert(dx2(gt.v));
        const auto rhs = rhs_v(u, gt.v, gt.nu, traj.sigma);
        rows.push_back({"residual_v", traj.times[k], sobolev_norm(lhs - rhs, c.s - 1.0)});
        const auto gw = make_gauge_weights(u, traj.sigma);
        for (int kk : {1, -1, 3, -3}) {
            const auto wm = gauge_exp(traj.states[k - 1], kk, traj.sigma);
            const auto wp = gauge_exp(traj.states[k + 1], kk, traj.sigma);
            SpectralField dw = wp - wm;
            dw *= cplx{1.0 / (2.0 * dt), 0.0};
            const auto wrhs = dt_gauge_exp(gw, u, kk);
            rows.push_back({"residual_W_" + std::to_string(kk), traj.times[k],
                            sobolev_norm(dw - wrhs, c.s - 1.0)});
        }
        rows.push_back(
            {"norm_Ru_ratio", traj.times[k],
             sobolev_norm(remainder_R(u, traj.sigma), c.s) /
                 ((1.0 + std::pow(sobolev_norm(u, c.s), 6.0)) * sobolev_norm(u, c.s))});
        rows.push_back(
            {"norm_v_ratio", traj.times[k],
             sobolev_norm(gt.v, c.s) /
                 ((1.0 + std::pow(sobolev_norm(u, c.s), 2.0)) * sobolev_norm(u, c.s))});
        const auto E1 = gauge_exp(u, 1, traj.sigma);
        const auto Em1 = gauge_exp(u, -1, traj.sigma);
        const auto rec = product(E1, gt.v) + product(Em1, conj_field(gt.v));
        rows.push_back({"reconstruction_err", traj.times[k], (rec - u).l2()});
    }
    const auto path = report_path(c, "csv");
    save_long_csv(c.config_hash(), rows, path);
    double worst = 0.0;
    for (const auto& r : rows)
        if (r.quantity == "residual_v") worst = std::max(worst, r.y);
    std::cout << "gauge-check: " << rows.size() << " rows, worst residual_v=" << worst
              << "\nreport: " << path << "\n";
    return 0;
}

int run_nf_expand(const RunConfig& c) {
    if (c.input.empty()) throw ConfigInvalid("nf-expand needs --input");
    const auto traj = load_trajectory(c.input);
    std::vector<NfSample> samples;
    samples.reserve(traj.samples());
    for (size_t k = 0; k < traj.samples(); ++k)
        samples.push_back(make_nf_sample(traj.times[k], traj.states[k], traj.sigma, c.eta));
    double M = c.M;
    if (M == 0.0) M = choose_M(samples, c.s);

    nlohmann::json out = report_envelope(c);
    out["parameters"]["M"] = M;
    auto records = nlohmann::json::array();

    auto push = [&](const std::string& fam, int J, double norm, double ratio,
                    double residual) {
        records.push_back({{"family", fam},
                           {"J", J},
                           {"norm_l2s", norm},
                           {"ratio", ratio},
                           {"residual", residual}});
    };

    if (c.mode == "exact") {
        const auto rep = telescoping_check(std::min(c.J, 2), samples, M, c.s, c.samples,
                                           c.seed);
        std::map<std::string, double> sup1, sup2;
        for (const auto& smp : samples) {
            const auto F1 = eval_families_j1(smp, M);
            sup1["N0"] = std::max(sup1["N0"], sobolev_norm(F1.boundary, c.s));
            sup1["NR"] = std::max(sup1["NR"], sobolev_norm(F1.resonant, c.s));
            sup1["N1"] = std::max(sup1["N1"], sobolev_norm(F1.weight_dt, c.s));
            sup1["R"] = std::max(sup1["R"], sobolev_norm(F1.remainder, c.s));
            sup1["Nnext"] = std::max(sup1["Nnext"], sobolev_norm(F1.next, c.s));
            if (c.J >= 2) {
                const auto F2 = eval_families_j2(smp, M);
                sup2["N0"] = std::max(sup2["N0"], sobolev_norm(F2.boundary, c.s));
                sup2["NR"] = std::max(sup2["NR"], sobolev_norm(F2.resonant, c.s));
                sup2["N1"] = std::max(sup2["N1"], sobolev_norm(F2.weight_dt, c.s));
                sup2["R"] = std::max(sup2["R"], sobolev_norm(F2.remainder, c.s));
            }
        }
        for (const auto& [fam, v] : sup1) push(fam, 1, v, 0.0, rep.residual);
        for (const auto& [fam, v] : sup2)
            push(fam, 2, v, sup1[fam] > 0 ? v / sup1[fam] : 0.0, rep.residual);
        out["residual"] = rep.residual;
        out["quad_error_est"] = rep.quad_error_est;
        std::cout << "nf-expand: J=" << c.J << " M=" << M
                  << " telescoping residual=" << rep.residual << "\n";
    } else {
        // Monte-Carlo: generation-3 objects on the mid sample
        const auto& smp = samples[samples.size() / 2];
        const auto g3 = mc_generation3(smp, M, c.samples, c.seed, c.threads);
        auto push_mc = [&](const std::string& fam, const McField& f) {
            push(fam, 3, f.debiased_norm(c.s), 0.0, f.norm_error(c.s));
        };
        push("Nnext", 2, g3.next_j2.debiased_norm(c.s), 0.0, g3.next_j2.norm_error(c.s));
        push_mc("N0", g3.boundary);
        push_mc("NR", g3.resonant);
        push_mc("N1", g3.weight_dt);
        push_mc("R", g3.remainder);
        std::cout << "nf-expand (mc): J=3 M=" << M << " samples=" << c.samples << "\n";
    }
    out["records"] = records;
    const auto path = report_path(c, "json");
    write_text_file(path, out.dump(2) + "\n");
    std::cout << "report: " << path << "\n";
    return 0;
}

int run_verify_estimates(const RunConfig& c) {
    const auto kind = parse_estimate_id(c.estimate_id_str);
    const double delta = c.delta > 0.0 ? c.delta : (c.s - 0.5) / 4.0;
    const auto rep = verify_estimate(kind, c.s, delta, parse_sizes(c.sizes), c.trials,
                                     c.seed, c.eta, c.threads);
    nlohmann::json out = report_envelope(c);
    out["id"] = rep.id;
    out["slope"] = rep.slope;
    auto arr = nlohmann::json::array();
    for (size_t k = 0; k < rep.sizes.size(); ++k) {
        const auto& r = rep.sizes[k];
        arr.push_back({{"n_max", r.n_max},
                       {"worst_ratio", r.worst_ratio},
                       {"worst_trial", r.worst_trial},
                       {"worst_i", r.worst_i},
                       {"replayed_ratio", replay_witness(rep, k)}});
    }
    out["sizes"] = arr;
    const auto path = report_path(c, "json");
    write_text_file(path, out.dump(2) + "\n");
    std::cout << "verify-estimates: id=" << rep.id << " slope=" << rep.slope
              << "\nreport: " << path << "\n";
    return 0;
}

int run_count_lemma(const RunConfig& c) {
    const Curve curve = c.curve == "ellipse" ? Curve::ellipse : Curve::hyperbola;
    const std::vector<std::pair<long long, long long>> centers{
        {0, 0}, {3, -5}, {-17, 11}, {101, 0}, {0, -257}};
    const auto rep = counting_scan(curve, c.rmax, centers, MuStrategy::all, c.seed);
    std::vector<LongRow> rows;
    for (size_t k = 0; k < rep.R_values.size(); ++k) {
        rows.push_back({"max_count", static_cast<double>(rep.R_values[k]),
                        static_cast<double>(rep.max_counts[k])});
        rows.push_back({"witness_mu", static_cast<double>(rep.R_values[k]),
                        static_cast<double>(rep.witness_mu[k])});
    }
    rows.push_back({"slope", static_cast<double>(c.rmax), rep.slope});
    const auto path = report_path(c, "csv");
    save_long_csv(c.config_hash(), rows, path);
    std::cout << "count-lemma: curve=" << c.curve << " slope=" << rep.slope
              << "\nreport: " << path << "\n";
    return 0;
}

int run_twin_probe(const RunConfig& c) {
    const auto u0 = make_datum(c.datum, c.n_max, c.seed);
    StepConfig a, b;
    a.dt = c.dt;
    b.dt = 0.5 * c.dt;
    a.sigma = b.sigma = c.sigma;
    const auto rep = twin_probe(u0, a, b, c.T, c.s);
    nlohmann::json out = report_envelope(c);
    out["divergence"] = rep.divergence;
    out["est_err_coarse"] = rep.est_err_coarse;
    out["est_err_fine"] = rep.est_err_fine;
    out["consistency_budget"] = rep.est_err_coarse + rep.est_err_fine;
    const auto path = report_path(c, "json");
    write_text_file(path, out.dump(2) + "\n");
    std::cout << "twin-probe: divergence=" << rep.divergence
              << " consistency budget=" << rep.est_err_coarse + rep.est_err_fine
              << "\nreport: " << path << "\n";
    return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
    try {
        validate(cfg);
        std::filesystem::create_directories(cfg.out_dir);
        if (cfg.subcommand == "simulate") return run_simulate(cfg);
        if (cfg.subcommand == "gauge-check") return run_gauge_check(cfg);
        if (cfg.subcommand == "nf-expand") return run_nf_expand(cfg);
        if (cfg.subcommand == "verify-estimates") return run_verify_estimates(cfg);
        if (cfg.subcommand == "count-lemma") return run_count_lemma(cfg);
        if (cfg.subcommand == "twin-probe") return run_twin_probe(cfg);
        throw ConfigInvalid("unknown subcommand: " + cfg.subcommand);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace mbo
