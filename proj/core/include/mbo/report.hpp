// Report plumbing: trajectory files (JSON lines with a leading meta record),
// conserved-quantity CSV, long-format CSV for plot-ready output, and the
// FNV-1a hash used to fingerprint configs in report filenames.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbo/solver.hpp"

namespace mbo {

uint64_t fnv1a64(const std::string& bytes);
std::string hex16(uint64_t value);

// Trajectory JSONL: first line {"meta": {...}}, then one record per sample
// {"t": <time>, "field": {"n_max": .., "is_real": .., "coeffs": [[re,im],..]}}.
void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

// CSV columns t,mean,l2,energy
void save_conserved_csv(const Trajectory& traj,
                        const std::vector<ConservedTriple>& rows,
                        const std::string& path);

// long-format CSV: run_id, quantity, x, y
struct LongRow {
    std::string quantity;
    double x = 0.0;
    double y = 0.0;
};
void save_long_csv(const std::string& run_id, const std::vector<LongRow>& rows,
                   const std::string& path);

void write_text_file(const std::string& path, const std::string& body);

}  // namespace mbo
