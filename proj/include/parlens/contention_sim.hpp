#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parlens/task_model.hpp"

namespace parlens {

enum class PolicyKind { Generalist, Specialist, GreedySpecialist };
std::string policy_name(PolicyKind p);
PolicyKind policy_from_name(const std::string& name);

/// Stage set per agent. Agents left with an empty set sit out the run.
struct SpecialistAssignment {
  std::vector<std::vector<int>> stages_per_agent;
};

struct SimConfig {
  TaskGraph task;
  int n_agents = 1;
  int base_duration = 10;  // D: one-agent job length; d_i = max(1, round(f_i * D))
  int jobs = 1;
  PolicyKind policy = PolicyKind::Generalist;
  std::optional<SpecialistAssignment> assignment;  // Specialist; defaults to optimal
  int switch_cost = 0;
  std::uint64_t seed = 0;
};

struct SimResult {
  PolicyKind policy = PolicyKind::Generalist;
  long makespan = 0;
  double throughput = 0.0;  // jobs per step
  double speedup = 1.0;     // vs. a one-agent generalist run of the same config
  double idle_fraction = 0.0;  // agent-steps blocked on a capacity-full subtask
  std::vector<std::vector<long>> per_agent_subtask_counts;  // [agent][stage]
  double si = 0.0;  // si_from_counts over agents that completed work
};

/// Integer stage durations for a given base duration D.
std::vector<int> stage_durations(const TaskGraph& task, int base_duration);

/// Water-filling role allocation: every stage staffed, extra agents added
/// where f_i per assigned agent is largest, never exceeding C_i; with fewer
/// agents than stages the topological order is split into contiguous
/// segments balancing load. N = 1 degenerates to one all-stage generalist.
SpecialistAssignment optimal_specialist_assignment(const TaskGraph& task,
                                                   int n_agents);

/// Discrete-time run. Generalist teams execute the task in synchronized
/// waves of up to N jobs: every agent carries its own job, the whole team
/// advances stage by stage, and within a stage at most C_i agents progress
/// while the rest wait. Specialist agents repeat their assigned stages,
/// handing jobs through unbounded inter-stage buffers. Deterministic; ties
/// for a freed slot go to the lowest agent index.
SimResult simulate(const SimConfig& config);

struct PolicyComparison {
  double bound = 1.0;  // S(N, C)
  SimResult generalist;
  SimResult specialist;
  SimResult greedy;
};

/// Both policy families on identical configs, plus the analytic bound.
PolicyComparison compare_policies(const SimConfig& config);

nlohmann::json sim_result_to_json(const SimResult& result);
nlohmann::json comparison_to_json(const PolicyComparison& cmp);

/// Sim spec JSON: task (inline object or "task_file"), optional
/// "layout_file", n_agents, duration, jobs, policy, switch_cost, seed,
/// optional assignment. Relative paths resolve against `base_dir`.
SimConfig parse_sim_spec(const nlohmann::json& j, const std::string& base_dir);

}  // namespace parlens
