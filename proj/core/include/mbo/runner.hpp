// Run configuration and subcommand dispatch.  The CLI binary parses flags
// into RunConfig; keeping the execution logic here lets tests drive the same
// paths without spawning processes.  Exit codes: 0 success, 2 invalid config,
// 3 numerical failure, 4 invariant violation.
#pragma once

#include <cstdint>
#include <string>

#include "mbo/spectral.hpp"

namespace mbo {

struct DatumSpec {
    std::string type = "two_mode";  // "two_mode" | "colored"
    double a = 0.5;                 // two_mode: a cos(x) + b cos(2x)
    double b = 0.25;
    double decay = 2.0;             // colored: coefficients ~ <n>^{-decay}
    double amplitude = 0.1;
};

struct RunConfig {
    std::string subcommand;
    int n_max = 64;
    double dt = 1e-4;
    double T = 1.0;
    int sigma = -1;
    double s = 0.6;
    double eta = 0x1p-10;
    double M = 64.0;       // 0 selects automatically
    double delta = 0.0;    // 0 defaults to (s - 1/2)/4
    uint64_t seed = 12345;
    int threads = 0;       // 0 = hardware concurrency
    DatumSpec datum;

    // subcommand-specific knobs
    std::string equation = "mbo-prime";  // simulate: "mbo" | "mbo-prime"
    int stride = 1;                      // simulate: sample every k-th step
    std::string input;                   // gauge-check / nf-expand: trajectory file
    std::string report;                  // output path ("" = templated name)
    std::string out_dir = ".";
    int J = 1;
    std::string mode = "exact";  // nf-expand: "exact" | "mc"
    long long samples = 200000;
    std::string estimate_id_str = "matome-1";
    std::string sizes = "16,32,64";
    int trials = 200;
    std::string curve = "hyperbola";
    long long rmax = 4096;

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    // stable fingerprint of every field
    std::string config_hash() const;
};

SpectralField make_datum(const DatumSpec& d, int n_max, uint64_t seed);

// Validates, runs, prints a human summary to stdout, writes machine reports.
// Returns the process exit code.
int run(const RunConfig& cfg);

}  // namespace mbo
