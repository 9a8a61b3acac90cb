#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "parlens/errors.hpp"

namespace parlens {

struct TrajectoryStep {
  long t = 0;
  std::string state;
  std::string action;
};

/// Per-agent step logs; step indices must be strictly increasing per agent.
struct TrajectoryLog {
  std::map<std::string, std::vector<TrajectoryStep>> agents;

  /// CSV with header `agent,t,state,action`, one row per step.
  static TrajectoryLog from_csv(std::istream& in);
  static TrajectoryLog load(const std::string& path);

  void validate() const;
  std::vector<std::string> agent_ids() const;
  /// Sorted union of action labels across all agents.
  std::vector<std::string> action_alphabet() const;
};

struct ActionDistribution {
  std::vector<std::string> support;
  Eigen::VectorXd probs;
};

/// Effective action distribution of one agent: discounted step weights
/// gamma^(t - t0) marginalized over states onto actions, renormalized over
/// the finite horizon so the result is a probability vector. gamma = 0
/// degenerates to the one-hot of the agent's first action.
ActionDistribution visitation_distribution(const TrajectoryLog& log,
                                           const std::string& agent,
                                           double gamma);

/// Jensen-Shannon divergence in bits: mean KL(P_i || M) against the uniform
/// mixture M, logs base 2. Identical inputs give exactly 0, pairwise
/// disjoint supports give exactly log2(N).
double jsd(const std::vector<ActionDistribution>& distributions);

/// Specialization Index: JSD normalized by log2(N) into [0, 1].
double si(const std::vector<ActionDistribution>& distributions);

/// Undiscounted shortcut used by the simulator and learners: counts are
/// normalized to frequencies over an implicit shared alphabet.
double si_from_counts(const std::vector<std::vector<double>>& counts);

nlohmann::json si_report_json(const std::vector<std::string>& agent_ids,
                              const std::vector<ActionDistribution>& dists);

}  // namespace parlens
