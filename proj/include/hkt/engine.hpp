#pragma once

#include "hkt/report.hpp"

namespace hkt::engine {

// Experiment drivers behind the CLI subcommands. Each returns a Report whose
// exit_code() follows the contract 0 pass / 1 fail / 2 indeterminate.
Report run_deform(const ExperimentConfig& cfg);
Report run_verify_realization(const ExperimentConfig& cfg);
Report run_twistor_verify(const ExperimentConfig& cfg);
Report run_bundle_indices(const ExperimentConfig& cfg);

// The acceptance suite: one record per criterion, ids "criterion.01".."12".
Report run_selftest(const ExperimentConfig& cfg);

// command dispatch ("deform", "verify-realization", "twistor-verify",
// "bundle-indices", "selftest")
Report run(const std::string& command, const ExperimentConfig& cfg);

} // namespace hkt::engine
