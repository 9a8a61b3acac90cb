#include "parlens/task_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace parlens {

namespace {

constexpr double kFractionTolerance = 1e-9;

Capacity capacity_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "unbounded") return Capacity::unbounded();
    throw ValidationError("capacity must be an integer or \"unbounded\"");
  }
  if (!j.is_number_integer())
    throw ValidationError("capacity must be an integer or \"unbounded\"");
  return Capacity(j.get<std::int64_t>());
}

nlohmann::json capacity_to_json(Capacity c) {
  if (c.is_unbounded()) return "unbounded";
  return c.count();
}

CellKind station_kind_or_throw(const std::string& name) {
  auto kind = station_from_name(name);
  if (!kind || !is_workstation(*kind))
    throw ValidationError("unknown station kind '" + name + "'");
  return *kind;
}

/// S from fractions and per-subtask effective concurrency min(N, C_i).
/// When all subtasks share one effective concurrency the harmonic sum
/// collapses algebraically, so return that value outright; this keeps the
/// full-concurrency (S = N) and unit-capacity (S = 1) endpoints exact.
double harmonic_speedup(const std::vector<double>& fractions,
                        const std::vector<std::int64_t>& effective,
                        int n_agents) {
  bool all_equal = true;
  for (size_t i = 1; i < effective.size(); ++i)
    if (effective[i] != effective[0]) all_equal = false;
  if (all_equal) return static_cast<double>(effective[0]);

  double denom = 0.0;
  for (size_t i = 0; i < fractions.size(); ++i)
    denom += fractions[i] / static_cast<double>(effective[i]);
  double s = 1.0 / denom;
  // absorb rounding at the [1, N] boundaries
  return std::clamp(s, 1.0, static_cast<double>(n_agents));
}

}  // namespace

void TaskGraph::validate() const {
  if (subtasks.empty()) throw ValidationError("task has no subtasks");
  double total = 0.0;
  for (const auto& sub : subtasks) {
    if (!(sub.fraction > 0.0) || sub.fraction > 1.0 + kFractionTolerance)
      throw ValidationError("subtask '" + sub.id + "' has fraction " +
                            std::to_string(sub.fraction) +
                            " outside (0, 1]");
    if (sub.concurrency() < Capacity(1))
      throw ValidationError("subtask '" + sub.id + "' has zero concurrency");
    total += sub.fraction;
  }
  if (std::abs(total - 1.0) > kFractionTolerance)
    throw ValidationError("subtask fractions sum to " + std::to_string(total) +
                          ", expected 1");
  for (auto [i, j] : precedence) {
    if (i < 0 || i >= size() || j < 0 || j >= size() || i == j)
      throw ValidationError("precedence pair (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range");
  }
  topological_order();
}

std::vector<int> TaskGraph::topological_order() const {
  const int m = size();
  std::vector<int> indegree(m, 0);
  for (auto [i, j] : precedence) ++indegree[j];
  std::vector<int> order;
  std::vector<bool> placed(m, false);
  for (int step = 0; step < m; ++step) {
    int pick = -1;
    for (int i = 0; i < m; ++i) {
      if (!placed[i] && indegree[i] == 0) {
        pick = i;
        break;
      }
    }
    if (pick == -1) throw ValidationError("precedence relation has a cycle");
    placed[pick] = true;
    order.push_back(pick);
    for (auto [i, j] : precedence)
      if (i == pick) --indegree[j];
  }
  return order;
}

std::string limiting_dimension_name(LimitingDimension d) {
  switch (d) {
    case LimitingDimension::None: return "none";
    case LimitingDimension::TeamSize: return "team_size";
    case LimitingDimension::Spatial: return "spatial";
    case LimitingDimension::Resource: return "resource";
  }
  return "?";
}

std::string regime_name(Regime r) {
  return r == Regime::Generalist ? "generalist" : "specialist";
}

ParallelizabilityReport parallelizability(const TaskGraph& task, int n_agents) {
  if (n_agents < 1)
    throw InvalidTeamSize("team size must be >= 1, got " +
                          std::to_string(n_agents));
  task.validate();

  std::vector<double> fractions;
  std::vector<std::int64_t> effective;
  for (const auto& sub : task.subtasks) {
    fractions.push_back(sub.fraction);
    effective.push_back(sub.concurrency().clamp_to_team(n_agents));
  }

  ParallelizabilityReport report;
  report.n_agents = n_agents;
  report.s = harmonic_speedup(fractions, effective, n_agents);
  report.regime = report.s < static_cast<double>(n_agents)
                      ? Regime::Specialist
                      : Regime::Generalist;
  for (size_t i = 0; i < task.subtasks.size(); ++i) {
    const auto& sub = task.subtasks[i];
    SubtaskReport sr;
    sr.id = sub.id;
    sr.fraction = sub.fraction;
    sr.concurrency = sub.concurrency();
    sr.spatial_capacity = sub.spatial_capacity;
    sr.resource_capacity = sub.resource_capacity;
    sr.congestion_score = sub.congestion_score;
    if (effective[i] == n_agents) {
      sr.limiting = LimitingDimension::None;
    } else if (sub.spatial_capacity < sub.resource_capacity) {
      sr.limiting = LimitingDimension::Spatial;
    } else {
      sr.limiting = LimitingDimension::Resource;  // ties report Resource
    }
    report.per_subtask.push_back(std::move(sr));
  }
  return report;
}

double amdahl_classic(double parallel_fraction, double speedup_factor) {
  if (parallel_fraction < 0.0 || parallel_fraction > 1.0)
    throw DomainError("parallel fraction must be in [0, 1]");
  if (speedup_factor < 1.0) throw DomainError("speedup factor must be >= 1");
  return 1.0 / ((1.0 - parallel_fraction) + parallel_fraction / speedup_factor);
}

std::vector<DiagnosisEntry> diagnose(const ParallelizabilityReport& report) {
  const int n = report.n_agents;
  std::vector<double> fractions;
  std::vector<std::int64_t> effective;
  for (const auto& sub : report.per_subtask) {
    fractions.push_back(sub.fraction);
    effective.push_back(sub.concurrency.clamp_to_team(n));
  }
  const double base = harmonic_speedup(fractions, effective, n);

  std::vector<DiagnosisEntry> entries;
  for (size_t i = 0; i < report.per_subtask.size(); ++i) {
    if (effective[i] >= n) continue;  // not a bottleneck
    auto relaxed = effective;
    relaxed[i] = std::min<std::int64_t>(relaxed[i] + 1, n);
    DiagnosisEntry entry;
    entry.subtask = static_cast<int>(i);
    entry.id = report.per_subtask[i].id;
    entry.dimension = report.per_subtask[i].limiting;
    entry.delta_s = harmonic_speedup(fractions, relaxed, n) - base;
    entries.push_back(std::move(entry));
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const DiagnosisEntry& a, const DiagnosisEntry& b) {
                     return a.delta_s > b.delta_s;
                   });
  return entries;
}

// ---------------------------------------------------------------------------
// Task specs

bool TaskSpec::is_abstract() const {
  if (subtasks.empty()) return false;
  for (const auto& sub : subtasks)
    if (!sub.fraction) return false;
  return true;
}

TaskSpec parse_task_spec(const nlohmann::json& j) {
  TaskSpec spec;
  if (j.contains("cook_duration")) spec.cook_duration = j.at("cook_duration").get<int>();
  if (j.contains("recipe")) {
    const auto& recipe = j.at("recipe");
    if (recipe.contains("onions")) spec.onions = recipe.at("onions").get<int>();
    if (recipe.contains("tomatoes")) spec.tomatoes = recipe.at("tomatoes").get<int>();
    if (spec.onions < 0 || spec.tomatoes < 0)
      throw ValidationError("recipe counts must be non-negative");
  }
  if (j.contains("subtasks")) {
    for (const auto& js : j.at("subtasks")) {
      SubtaskSpec sub;
      sub.id = js.at("id").get<std::string>();
      if (js.contains("from_station"))
        sub.from_station = station_kind_or_throw(js.at("from_station").get<std::string>());
      if (js.contains("to_station"))
        sub.to_station = station_kind_or_throw(js.at("to_station").get<std::string>());
      if (js.contains("fixed_duration")) {
        sub.fixed_duration = js.at("fixed_duration").get<int>();
        if (*sub.fixed_duration < 1)
          throw ValidationError("fixed_duration must be >= 1");
      }
      if (js.contains("station"))
        sub.station = station_kind_or_throw(js.at("station").get<std::string>());
      if (js.contains("fraction")) sub.fraction = js.at("fraction").get<double>();
      if (js.contains("spatial_capacity"))
        sub.spatial_capacity = capacity_from_json(js.at("spatial_capacity"));
      if (js.contains("resource_capacity"))
        sub.resource_capacity = capacity_from_json(js.at("resource_capacity"));

      bool movement = sub.from_station && sub.to_station;
      bool timed = sub.fixed_duration.has_value();
      bool abstract = sub.fraction.has_value();
      if (!movement && !timed && !abstract)
        throw ValidationError("subtask '" + sub.id +
                              "' needs stations, a fixed_duration, or a fraction");
      spec.subtasks.push_back(std::move(sub));
    }
  }
  if (j.contains("precedence")) {
    for (const auto& p : j.at("precedence")) {
      if (!p.is_array() || p.size() != 2)
        throw ValidationError("precedence entries must be [i, j] pairs");
      spec.precedence.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  }
  return spec;
}

TaskSpec load_task_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open task spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad JSON in '" + path + "': " + e.what());
  }
  return parse_task_spec(j);
}

TaskSpec expand_recipe(const TaskSpec& spec) {
  if (!spec.subtasks.empty()) return spec;
  if (spec.onions + spec.tomatoes < 1)
    throw EmptyRecipe("recipe has no ingredients and no subtasks");

  TaskSpec out = spec;
  auto deposit = [&](CellKind kind, int copy, int copies) {
    SubtaskSpec sub;
    sub.id = station_name(kind) + "-to-pot";
    if (copies > 1) sub.id += "-" + std::to_string(copy + 1);
    sub.from_station = kind;
    sub.to_station = CellKind::Pot;
    out.subtasks.push_back(std::move(sub));
  };
  for (int k = 0; k < spec.onions; ++k) deposit(CellKind::OnionPile, k, spec.onions);
  for (int k = 0; k < spec.tomatoes; ++k) deposit(CellKind::TomatoPile, k, spec.tomatoes);

  const int n_deposits = static_cast<int>(out.subtasks.size());
  SubtaskSpec cook;
  cook.id = "cook";
  cook.fixed_duration = spec.cook_duration;
  cook.station = CellKind::Pot;
  out.subtasks.push_back(std::move(cook));

  SubtaskSpec plate;
  plate.id = "bowl-to-pot";
  plate.from_station = CellKind::BowlStack;
  plate.to_station = CellKind::Pot;
  out.subtasks.push_back(std::move(plate));

  SubtaskSpec serve;
  serve.id = "pot-to-serve";
  serve.from_station = CellKind::Pot;
  serve.to_station = CellKind::ServeWindow;
  out.subtasks.push_back(std::move(serve));

  const int cook_idx = n_deposits;
  for (int k = 0; k < n_deposits; ++k) out.precedence.emplace_back(k, cook_idx);
  out.precedence.emplace_back(cook_idx, cook_idx + 1);
  out.precedence.emplace_back(cook_idx + 1, cook_idx + 2);
  return out;
}

namespace {

struct ResolvedLeg {
  bool movement = false;
  int from_node = -1;  // walkable endpoints of the leg
  int to_node = -1;
  int distance = 0;
};

/// Pick, over all station instances of the two kinds and all their service
/// cells, the endpoint pair minimizing path length. Candidates are scanned
/// in node order so ties resolve lexicographically.
ResolvedLeg resolve_leg(const LayoutGraph& graph, CellKind from_kind,
                        CellKind to_kind) {
  auto from_stations = graph.nodes_of_cell(from_kind);
  auto to_stations = graph.nodes_of_cell(to_kind);
  if (from_stations.empty())
    throw ValidationError("layout has no " + station_name(from_kind) + " station");
  if (to_stations.empty())
    throw ValidationError("layout has no " + station_name(to_kind) + " station");

  ResolvedLeg best;
  best.movement = true;
  bool found = false;
  for (int a : from_stations) {
    for (int fa : graph.adjacent_walkable(a)) {
      for (int b : to_stations) {
        for (int fb : graph.adjacent_walkable(b)) {
          int dist;
          try {
            dist = shortest_path(graph, fa, fb).length;
          } catch (const Unreachable&) {
            continue;
          }
          if (!found || dist < best.distance) {
            found = true;
            best.distance = dist;
            best.from_node = fa;
            best.to_node = fb;
          }
        }
      }
    }
  }
  if (!found)
    throw Unreachable("no route between " + station_name(from_kind) + " and " +
                      station_name(to_kind) + " stations");
  return best;
}

std::vector<ResolvedLeg> resolve_legs(const LayoutGraph& graph,
                                      const TaskSpec& spec) {
  std::vector<ResolvedLeg> legs;
  for (const auto& sub : spec.subtasks) {
    if (sub.from_station && sub.to_station) {
      legs.push_back(resolve_leg(graph, *sub.from_station, *sub.to_station));
    } else if (sub.fixed_duration) {
      ResolvedLeg leg;
      leg.distance = *sub.fixed_duration;
      legs.push_back(leg);
    } else {
      throw ValidationError("subtask '" + sub.id +
                            "' is neither a movement leg nor a timed subtask");
    }
  }
  return legs;
}

}  // namespace

TaskGraph estimate_fractions(const LayoutGraph& graph, const TaskSpec& raw) {
  TaskSpec spec = expand_recipe(raw);
  auto legs = resolve_legs(graph, spec);

  double total = 0.0;
  std::vector<int> durations;
  for (const auto& leg : legs) {
    int d = leg.movement ? std::max(1, leg.distance) : leg.distance;
    durations.push_back(d);
    total += d;
  }

  TaskGraph task;
  for (size_t i = 0; i < spec.subtasks.size(); ++i) {
    SubtaskProfile profile;
    profile.id = spec.subtasks[i].id;
    profile.fraction = durations[i] / total;
    if (spec.subtasks[i].fixed_duration)
      profile.fixed_duration = spec.subtasks[i].fixed_duration;
    task.subtasks.push_back(std::move(profile));
  }
  for (auto p : spec.precedence) task.precedence.insert(p);
  task.validate();
  return task;
}

TaskGraph subtask_capacities(const LayoutGraph& graph, TaskGraph task,
                             const TaskSpec& raw) {
  TaskSpec spec = expand_recipe(raw);
  if (spec.subtasks.size() != task.subtasks.size())
    throw ValidationError("task spec and task graph disagree on subtask count");
  auto legs = resolve_legs(graph, spec);
  EdgeCentralityMap centrality = edge_betweenness(graph);

  for (size_t i = 0; i < task.subtasks.size(); ++i) {
    auto& profile = task.subtasks[i];
    const auto& sub = spec.subtasks[i];
    const auto& leg = legs[i];

    std::optional<CellKind> resource_kind;
    if (leg.movement) {
      profile.spatial_capacity =
          Capacity(disjoint_path_capacity(graph, leg.from_node, leg.to_node));
      auto path = shortest_path(graph, leg.from_node, leg.to_node);
      double congestion = 0.0;
      for (size_t k = 0; k + 1 < path.nodes.size(); ++k)
        congestion += centrality[graph.edge_index(path.nodes[k], path.nodes[k + 1])];
      profile.congestion_score = congestion;
      resource_kind = sub.to_station;
    } else {
      profile.spatial_capacity = Capacity::unbounded();
      profile.congestion_score = 0.0;
      resource_kind = sub.station;
    }

    if (resource_kind) {
      std::int64_t total = 0;
      for (int v : graph.nodes_of_cell(*resource_kind))
        total += graph.node(v).capacity;
      profile.resource_capacity = Capacity(total);
    } else {
      profile.resource_capacity = Capacity::unbounded();
    }
    if (profile.concurrency() < Capacity(1))
      throw ValidationError("subtask '" + profile.id +
                            "' has zero concurrency (check station capacities)");
  }
  task.validate();
  return task;
}

TaskGraph task_from_abstract(const TaskSpec& spec) {
  TaskGraph task;
  for (const auto& sub : spec.subtasks) {
    SubtaskProfile profile;
    profile.id = sub.id;
    profile.fraction = *sub.fraction;
    if (sub.spatial_capacity) profile.spatial_capacity = *sub.spatial_capacity;
    if (sub.resource_capacity) profile.resource_capacity = *sub.resource_capacity;
    if (sub.fixed_duration) profile.fixed_duration = sub.fixed_duration;
    task.subtasks.push_back(std::move(profile));
  }
  for (auto p : spec.precedence) task.precedence.insert(p);
  task.validate();
  return task;
}

TaskGraph analyze_task(const LayoutGraph* graph, const TaskSpec& spec) {
  if (spec.is_abstract()) return task_from_abstract(spec);
  if (!graph)
    throw ValidationError(
        "task spec uses stations or a recipe; a layout is required");
  TaskGraph task = estimate_fractions(*graph, spec);
  return subtask_capacities(*graph, std::move(task), spec);
}

nlohmann::json report_to_json(const ParallelizabilityReport& report,
                              const std::vector<DiagnosisEntry>& diagnosis) {
  nlohmann::json subtasks = nlohmann::json::array();
  for (const auto& sub : report.per_subtask) {
    subtasks.push_back({{"id", sub.id},
                        {"fraction", sub.fraction},
                        {"concurrency", capacity_to_json(sub.concurrency)},
                        {"spatial_capacity", capacity_to_json(sub.spatial_capacity)},
                        {"resource_capacity", capacity_to_json(sub.resource_capacity)},
                        {"limiting_dimension", limiting_dimension_name(sub.limiting)},
                        {"congestion_score", sub.congestion_score}});
  }
  nlohmann::json diag = nlohmann::json::array();
  for (const auto& entry : diagnosis) {
    diag.push_back({{"subtask", entry.subtask},
                    {"id", entry.id},
                    {"dimension", limiting_dimension_name(entry.dimension)},
                    {"delta_s", entry.delta_s}});
  }
  return {{"S", report.s},
          {"n_agents", report.n_agents},
          {"regime", regime_name(report.regime)},
          {"per_subtask", subtasks},
          {"diagnosis", diag}};
}

}  // namespace parlens
