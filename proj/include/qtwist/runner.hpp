#pragma once

#include "qtwist/config.hpp"
#include "qtwist/report.hpp"

namespace qtwist {

// Runs one command family ("relations", "haar", "cocycle", "converge",
// "twist" or "all") and returns the canonically ordered report. Independent
// sub-checks run on a worker pool capped by QTWIST_THREADS; results are
// reduced in a fixed order so the report is schedule-independent.
Report run(const ExperimentConfig& config, const std::string& command);

}  // namespace qtwist
