#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parlens/capacity.hpp"
#include "parlens/layout_graph.hpp"

namespace parlens {

struct SubtaskProfile {
  std::string id;
  double fraction = 0.0;  // f_i, in (0, 1]
  Capacity spatial_capacity = Capacity::unbounded();   // C^s_i
  Capacity resource_capacity = Capacity::unbounded();  // C^r_i
  double congestion_score = 0.0;  // betweenness sum along the subtask path
  std::optional<int> fixed_duration;  // timed subtasks (Cook)

  Capacity concurrency() const { return min(spatial_capacity, resource_capacity); }
};

/// DAG of subtasks. Fractions must sum to 1 (within 1e-9) and the
/// precedence relation must be acyclic.
struct TaskGraph {
  std::vector<SubtaskProfile> subtasks;
  std::set<std::pair<int, int>> precedence;  // (i -> j): j waits for i

  int size() const { return static_cast<int>(subtasks.size()); }
  void validate() const;
  std::vector<int> topological_order() const;  // throws ValidationError on cycle
};

enum class LimitingDimension { None, TeamSize, Spatial, Resource };
std::string limiting_dimension_name(LimitingDimension d);

enum class Regime { Generalist, Specialist };
std::string regime_name(Regime r);

struct SubtaskReport {
  std::string id;
  double fraction = 0.0;
  Capacity concurrency;
  Capacity spatial_capacity;
  Capacity resource_capacity;
  LimitingDimension limiting = LimitingDimension::None;
  double congestion_score = 0.0;
};

struct ParallelizabilityReport {
  double s = 1.0;
  int n_agents = 1;
  Regime regime = Regime::Generalist;
  std::vector<SubtaskReport> per_subtask;
};

/// Task parallelizability S(N,C) = 1 / sum_i f_i / min(N, C_i).
/// When every subtask admits the same effective concurrency v the result is
/// exactly v, so the full-concurrency and unit-capacity endpoints are exact.
ParallelizabilityReport parallelizability(const TaskGraph& task, int n_agents);

/// Classic Amdahl speedup 1 / ((1-f) + f/s) for parallel fraction f.
double amdahl_classic(double parallel_fraction, double speedup_factor);

struct DiagnosisEntry {
  int subtask = 0;
  std::string id;
  LimitingDimension dimension = LimitingDimension::None;
  double delta_s = 0.0;  // gain in S from raising this subtask's C_i by one
};

/// Marginal gain of relaxing each bottlenecked subtask by one agent slot,
/// ranked by descending gain (ties by subtask index).
std::vector<DiagnosisEntry> diagnose(const ParallelizabilityReport& report);

// ---------------------------------------------------------------------------
// Task specs: the JSON-facing description of a task, either abstract
// (explicit fractions and capacities) or layout-based (station-to-station
// movement legs resolved against a LayoutGraph).

struct SubtaskSpec {
  std::string id;
  std::optional<CellKind> from_station;
  std::optional<CellKind> to_station;
  std::optional<int> fixed_duration;
  std::optional<CellKind> station;  // resource used by a timed subtask
  // abstract form:
  std::optional<double> fraction;
  std::optional<Capacity> spatial_capacity;
  std::optional<Capacity> resource_capacity;
};

struct TaskSpec {
  std::vector<SubtaskSpec> subtasks;
  std::vector<std::pair<int, int>> precedence;
  int onions = 0;
  int tomatoes = 0;
  int cook_duration = 10;

  bool is_abstract() const;
};

TaskSpec parse_task_spec(const nlohmann::json& j);
TaskSpec load_task_spec(const std::string& path);

/// Expand a recipe ({onions, tomatoes}) into the standard soup DAG:
/// ingredient deposits -> cook -> bowl leg -> serve leg. No-op when the
/// spec already lists subtasks.
TaskSpec expand_recipe(const TaskSpec& spec);

/// Fractions from normalized distances: d(i) is the shortest-path length
/// between the floor cells serving a leg's endpoint stations (the pair
/// minimizing path length), or the fixed duration for timed subtasks.
TaskGraph estimate_fractions(const LayoutGraph& graph, const TaskSpec& spec);

/// Fill spatial capacity (vertex-disjoint path count between the leg's
/// endpoints), resource capacity (sum of c(v) over stations of the
/// subtask's target kind) and the congestion score (betweenness sum along
/// the leg's shortest path).
TaskGraph subtask_capacities(const LayoutGraph& graph, TaskGraph task,
                             const TaskSpec& spec);

/// Abstract specs (explicit fractions/capacities) need no layout.
TaskGraph task_from_abstract(const TaskSpec& spec);

/// One-stop: abstract specs go straight to a TaskGraph, layout-based specs
/// run recipe expansion, fraction estimation and capacity scoring.
TaskGraph analyze_task(const LayoutGraph* graph, const TaskSpec& spec);

nlohmann::json report_to_json(const ParallelizabilityReport& report,
                              const std::vector<DiagnosisEntry>& diagnosis);

}  // namespace parlens
