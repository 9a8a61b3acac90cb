#pragma once

#include <cstdint>
#include <string>

#include "parlens/csv.hpp"

namespace parlens {

/// Run the sweep described by a JSON spec and write the SweepRow CSV
/// (columns env_id,S,N,si,reward,seed,regime_predicted,regime_observed).
/// Instances may be analytic (explicit task, predicted SI), simulated
/// (policy comparison; the best-throughput policy's behavior is observed),
/// or learner runs (best seed per the exclusion rule). With resume = true,
/// env_ids already present in the output file are kept, not recomputed.
/// Failing instances are logged to stderr and skipped.
CsvTable run_sweep(const std::string& spec_path, const std::string& out_path,
                   bool resume, std::uint64_t default_seed);

/// Learner-only sweep: one row per (config, seed), columns
/// env_id,S,padding,recipe,seed,si,reward.
CsvTable run_learn_spec(const std::string& spec_path, std::uint64_t default_seed);

}  // namespace parlens
