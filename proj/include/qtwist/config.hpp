#pragma once

#include "qtwist/cocycle.hpp"

namespace qtwist {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validated run configuration (JSON document; every TruncSpec/QSeq invariant
// is checked before any computation). Same config + same build gives a
// bitwise-identical report.
struct ExperimentConfig {
    QSeq q_seq = QSeq::geometric(0.5, 0.5, 6);
    int fock_levels = 8;
    int winding_radius = 3;
    int factors = 6;
    int twist_level = 3;
    int probes = 20;
    uint64_t seed = 42;
    double cluster_tol = -1.0;  // <0: auto
    std::vector<std::string> commands = {"all"};
    std::string out_path;  // empty: print summary only
    std::string format = "csv";
    bool qseq_summable_warning = false;  // explicit list without decay evidence
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace qtwist
