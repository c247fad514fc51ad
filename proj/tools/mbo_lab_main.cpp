// mbo-lab: spectral laboratory for the periodic modified Benjamin-Ono
// equation.  Subcommands: simulate, gauge-check, nf-expand, verify-estimates,
// count-lemma, twin-probe.  All runs are deterministic for a fixed seed; see
// --help of each subcommand for the knobs and their defaults.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mbo/errors.hpp"
#include "mbo/runner.hpp"

namespace {

void add_common(CLI::App* app, mbo::RunConfig& cfg) {
    app->add_option("--n-max", cfg.n_max, "lattice half-width N")->capture_default_str();
    app->add_option("--dt", cfg.dt, "time step")->capture_default_str();
    app->add_option("--T", cfg.T, "final time")->capture_default_str();
    app->add_option("--sigma", cfg.sigma, "+1 focusing, -1 defocusing")
        ->capture_default_str();
    app->add_option("--s", cfg.s, "Sobolev index")->capture_default_str();
    app->add_option("--eta", cfg.eta, "harmless-region parameter")->capture_default_str();
    app->add_option("--M", cfg.M, "resonance threshold (0 = auto)")
        ->capture_default_str();
    app->add_option("--delta", cfg.delta, "phase-gain exponent (0 = (s-1/2)/4)")
        ->capture_default_str();
    app->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    app->add_option("--out-dir", cfg.out_dir, "directory for reports")
        ->capture_default_str();
    app->add_option("--report", cfg.report,
                    "report path (default <subcommand>-<confighash>.<ext>)");
    app->add_option("--datum-type", cfg.datum.type, "two_mode | colored")
        ->capture_default_str();
    app->add_option("--datum-a", cfg.datum.a, "two_mode amplitude of cos(x)")
        ->capture_default_str();
    app->add_option("--datum-b", cfg.datum.b, "two_mode amplitude of cos(2x)")
        ->capture_default_str();
    app->add_option("--datum-decay", cfg.datum.decay, "colored spectral decay")
        ->capture_default_str();
    app->add_option("--datum-amplitude", cfg.datum.amplitude, "colored amplitude")
        ->capture_default_str();
    app->set_config("--config", "", "TOML config file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for the periodic modified Benjamin-Ono equation"};
    app.require_subcommand(0, 1);

    mbo::RunConfig cfg;
    std::string config_json;
    app.add_option("--config-json", config_json,
                   "JSON config file; replaces all other flags");

    auto* sim = app.add_subcommand("simulate", "integrate the equation and log invariants");
    add_common(sim, cfg);
    sim->add_option("--equation", cfg.equation, "mbo | mbo-prime")->capture_default_str();
    sim->add_option("--stride", cfg.stride, "store every k-th step")->capture_default_str();

    auto* gauge = app.add_subcommand("gauge-check",
                                     "residuals of the transformed equation on a trajectory");
    add_common(gauge, cfg);
    gauge->add_option("--input", cfg.input, "trajectory file (JSONL)")->required();

    auto* nf = app.add_subcommand("nf-expand", "normal-form families and telescoping");
    add_common(nf, cfg);
    nf->add_option("--traj,--input", cfg.input, "trajectory file (JSONL)")->required();
    nf->add_option("--J", cfg.J, "generation (1, 2, or 3)")->capture_default_str();
    nf->add_option("--mode", cfg.mode, "exact | mc")->capture_default_str();
    nf->add_option("--samples", cfg.samples, "Monte-Carlo samples")->capture_default_str();

    auto* est = app.add_subcommand("verify-estimates", "quintilinear estimate campaigns");
    add_common(est, cfg);
    est->add_option("--id", cfg.estimate_id_str,
                    "matome-0..3 | 5linear-0..2 | 6linear-0..2")
        ->capture_default_str();
    est->add_option("--sizes", cfg.sizes, "comma-separated lattice sizes")
        ->capture_default_str();
    est->add_option("--trials", cfg.trials, "trials per size")->capture_default_str();

    auto* cl = app.add_subcommand("count-lemma", "lattice point counts on conics");
    add_common(cl, cfg);
    cl->add_option("--curve", cfg.curve, "ellipse | hyperbola")->capture_default_str();
    cl->add_option("--rmax", cfg.rmax, "largest l1 radius (<= 4096)")
        ->capture_default_str();

    auto* twin = app.add_subcommand("twin-probe", "dt vs dt/2 divergence probe");
    add_common(twin, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (auto* sub : {sim, gauge, nf, est, cl, twin})
        if (sub->parsed()) cfg.subcommand = sub->get_name();

    if (!config_json.empty()) {
        std::ifstream is(config_json);
        if (!is) {
            std::cerr << "config error: cannot open " << config_json << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << is.rdbuf();
        try {
            auto from_file = mbo::RunConfig::from_json(ss.str());
            if (from_file.subcommand.empty()) from_file.subcommand = cfg.subcommand;
            cfg = from_file;
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }

    if (cfg.subcommand.empty()) {
        std::cerr << app.help() << "\n";
        return 2;
    }
    return mbo::run(cfg);
}
