#include "mbo/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mbo/errors.hpp"

namespace mbo {

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string hex16(uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigInvalid("cannot open for writing: " + path);
    os << body;
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigInvalid("cannot open for writing: " + path);
    nlohmann::json meta;
    meta["meta"] = {{"sigma", traj.sigma},
                    {"dt", traj.dt},
                    {"scheme_id", traj.scheme_id},
                    {"samples", traj.samples()}};
    os << meta.dump() << "\n";
    for (size_t k = 0; k < traj.samples(); ++k) {
        nlohmann::json rec;
        rec["t"] = traj.times[k];
        rec["field"] = nlohmann::json::parse(traj.states[k].to_json());
        os << rec.dump() << "\n";
    }
}

Trajectory load_trajectory(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigInvalid("cannot open trajectory file: " + path);
    Trajectory traj;
    std::string line;
    bool have_meta = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            traj.sigma = m.at("sigma").get<int>();
            traj.dt = m.at("dt").get<double>();
            traj.scheme_id = m.value("scheme_id", std::string("rk4-twisted"));
            have_meta = true;
            continue;
        }
        traj.times.push_back(j.at("t").get<double>());
        traj.states.push_back(SpectralField::from_json(j.at("field").dump()));
    }
    if (!have_meta) throw ConfigInvalid("trajectory file lacks the meta record: " + path);
    if (traj.states.empty()) throw ConfigInvalid("trajectory file has no samples: " + path);
    return traj;
}

void save_conserved_csv(const Trajectory& traj,
                        const std::vector<ConservedTriple>& rows,
                        const std::string& path) {
    std::ostringstream os;
    os << "t,mean,l2,energy\n";
    os.precision(17);
    for (size_t k = 0; k < rows.size(); ++k)
        os << traj.times[k] << "," << rows[k].mean << "," << rows[k].mass_l2 << ","
           << rows[k].energy << "\n";
    write_text_file(path, os.str());
}

void save_long_csv(const std::string& run_id, const std::vector<LongRow>& rows,
                   const std::string& path) {
    std::ostringstream os;
    os << "run_id,quantity,x,y\n";
    os.precision(17);
    for (const auto& r : rows)
        os << run_id << "," << r.quantity << "," << r.x << "," << r.y << "\n";
    write_text_file(path, os.str());
}

}  // namespace mbo
