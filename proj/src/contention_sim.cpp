#include "parlens/contention_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parlens/specialization.hpp"

namespace parlens {

std::string policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::Generalist: return "generalist";
    case PolicyKind::Specialist: return "specialist";
    case PolicyKind::GreedySpecialist: return "greedy_specialist";
  }
  return "?";
}

PolicyKind policy_from_name(const std::string& name) {
  if (name == "generalist") return PolicyKind::Generalist;
  if (name == "specialist") return PolicyKind::Specialist;
  if (name == "greedy_specialist" || name == "greedy")
    return PolicyKind::GreedySpecialist;
  throw ValidationError("unknown policy '" + name + "'");
}

std::vector<int> stage_durations(const TaskGraph& task, int base_duration) {
  if (base_duration < task.size())
    throw ValidationError("base duration " + std::to_string(base_duration) +
                          " is shorter than the number of subtasks");
  std::vector<int> durations;
  for (const auto& sub : task.subtasks) {
    durations.push_back(std::max(
        1, static_cast<int>(std::lround(sub.fraction * base_duration))));
  }
  return durations;
}

SpecialistAssignment optimal_specialist_assignment(const TaskGraph& task,
                                                   int n_agents) {
  if (n_agents < 1) throw InvalidTeamSize("team size must be >= 1");
  task.validate();
  const int m = task.size();
  const auto topo = task.topological_order();
  SpecialistAssignment assignment;
  assignment.stages_per_agent.resize(n_agents);

  if (n_agents < m) {
    // Split the topological order into contiguous segments with balanced
    // load (minimize the maximum segment fraction sum).
    std::vector<double> prefix(m + 1, 0.0);
    for (int i = 0; i < m; ++i)
      prefix[i + 1] = prefix[i] + task.subtasks[topo[i]].fraction;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(m + 1,
                                          std::vector<double>(n_agents + 1, inf));
    std::vector<std::vector<int>> cut(m + 1, std::vector<int>(n_agents + 1, -1));
    best[0][0] = 0.0;
    for (int i = 1; i <= m; ++i) {
      for (int k = 1; k <= n_agents; ++k) {
        for (int j = k - 1; j < i; ++j) {
          double candidate = std::max(best[j][k - 1], prefix[i] - prefix[j]);
          if (candidate < best[i][k]) {
            best[i][k] = candidate;
            cut[i][k] = j;
          }
        }
      }
    }
    int i = m;
    for (int k = n_agents; k >= 1; --k) {
      int j = cut[i][k];
      for (int p = j; p < i; ++p)
        assignment.stages_per_agent[k - 1].push_back(topo[p]);
      i = j;
    }
    return assignment;
  }

  // One agent per stage, then water-fill: add each spare agent to the stage
  // with the highest remaining fraction per assigned agent, capped at C_i.
  std::vector<std::int64_t> staffed(m, 1);
  std::vector<std::int64_t> cap(m);
  for (int i = 0; i < m; ++i)
    cap[i] = task.subtasks[i].concurrency().clamp_to_team(n_agents);
  int spare = n_agents - m;
  while (spare > 0) {
    int pick = -1;
    double best_rate = -1.0;
    for (int i = 0; i < m; ++i) {
      if (staffed[i] >= cap[i]) continue;
      double rate = task.subtasks[i].fraction / static_cast<double>(staffed[i]);
      if (rate > best_rate + 1e-15) {
        best_rate = rate;
        pick = i;
      }
    }
    if (pick == -1) break;  // everything at capacity; leftovers sit out
    ++staffed[pick];
    --spare;
  }
  int agent = 0;
  for (int idx = 0; idx < m; ++idx) {
    int stage = topo[idx];
    for (std::int64_t k = 0; k < staffed[stage]; ++k)
      assignment.stages_per_agent[agent++] = {stage};
  }
  return assignment;
}

namespace {

struct Engine {
  const TaskGraph& task;
  int n_agents;
  std::vector<int> durations;
  std::vector<std::int64_t> cap;  // min(C_i, N)
  std::vector<std::vector<int>> preds;
  std::vector<int> topo;
  int jobs;
  int switch_cost;

  std::vector<std::vector<long>> counts;  // [agent][stage]
  long blocked_steps = 0;
  long makespan = 0;

  Engine(const SimConfig& config)
      : task(config.task),
        n_agents(config.n_agents),
        durations(stage_durations(config.task, config.base_duration)),
        jobs(config.jobs),
        switch_cost(config.switch_cost) {
    const int m = task.size();
    cap.resize(m);
    for (int i = 0; i < m; ++i)
      cap[i] = task.subtasks[i].concurrency().clamp_to_team(n_agents);
    preds.resize(m);
    for (auto [i, j] : task.precedence) preds[j].push_back(i);
    topo = task.topological_order();
    counts.assign(n_agents, std::vector<long>(m, 0));
  }

  long watchdog_limit() const {
    long total_d = std::accumulate(durations.begin(), durations.end(), 0L);
    return (total_d + switch_cost) * task.size() + 16;
  }
};

/// Generalist teams: jobs are processed in waves of up to N, one job per
/// agent, and the whole wave advances through the stages together. Within a
/// stage at most C_i agents work at a time; an agent whose stage work is
/// pending but finds the stage full is capacity-blocked.
struct WaveEngine : Engine {
  using Engine::Engine;

  void run() {
    const int m = task.size();
    struct AgentState {
      int job = -1;
      bool stage_done = false;
      bool working = false;
      int work_left = 0;
      int switch_left = 0;
      int tooled_stage = -1;  // stage the agent last set up for
    };
    std::vector<AgentState> agents(n_agents);
    std::vector<std::int64_t> occupancy(m, 0);

    int completed = 0;
    long step = 0;
    long quiet_steps = 0;
    const long quiet_limit = watchdog_limit();

    int wave_first_job = 0;
    int wave_size = std::min(n_agents, jobs - wave_first_job);
    int phase = 0;  // index into topo
    for (int a = 0; a < n_agents; ++a)
      agents[a].job = a < wave_size ? wave_first_job + a : -1;

    while (completed < jobs) {
      const int stage = topo[phase];
      bool progress = false;

      // entries, lowest agent index first
      for (int a = 0; a < n_agents; ++a) {
        AgentState& st = agents[a];
        if (st.job < 0 || st.stage_done || st.working || st.switch_left > 0)
          continue;
        if (switch_cost > 0 && st.tooled_stage != -1 &&
            st.tooled_stage != stage) {
          st.switch_left = switch_cost;
          continue;
        }
        if (occupancy[stage] < cap[stage]) {
          occupancy[stage] += 1;
          st.working = true;
          st.work_left = durations[stage];
          st.tooled_stage = stage;
        } else {
          blocked_steps += 1;
        }
      }

      // work
      for (int a = 0; a < n_agents; ++a) {
        AgentState& st = agents[a];
        if (st.switch_left > 0) {
          st.switch_left -= 1;
          if (st.switch_left == 0) st.tooled_stage = stage;
          progress = true;
        } else if (st.working) {
          st.work_left -= 1;
          progress = true;
          if (st.work_left == 0) {
            st.working = false;
            st.stage_done = true;
            occupancy[stage] -= 1;
            counts[a][stage] += 1;
            if (phase == m - 1) {
              completed += 1;
              if (completed == jobs) makespan = step + 1;
            }
          }
        }
      }

      // wave bookkeeping at the step boundary
      bool phase_done = true;
      for (int a = 0; a < n_agents; ++a)
        if (agents[a].job >= 0 && !agents[a].stage_done) phase_done = false;
      if (phase_done) {
        phase += 1;
        for (auto& st : agents) st.stage_done = false;
        if (phase == m) {
          phase = 0;
          wave_first_job += wave_size;
          wave_size = std::min(n_agents, jobs - wave_first_job);
          for (int a = 0; a < n_agents; ++a)
            agents[a].job = a < wave_size ? wave_first_job + a : -1;
        }
      }

      quiet_steps = progress ? 0 : quiet_steps + 1;
      if (quiet_steps > quiet_limit) throw Deadlock(snapshot(step, occupancy));
      ++step;
    }
  }

  std::string snapshot(long step, const std::vector<std::int64_t>& occ) const {
    std::ostringstream out;
    out << "no progress for " << watchdog_limit() << " steps at step " << step
        << "; occupancy:";
    for (auto o : occ) out << " " << o;
    return out.str();
  }
};

/// Specialist pipelines: agents repeat the stages they are assigned,
/// claiming ready (job, stage) work items and handing jobs downstream
/// through unbounded buffers. Greedy specialists own every stage.
struct PipelineEngine : Engine {
  SpecialistAssignment assignment;

  PipelineEngine(const SimConfig& config, SpecialistAssignment assign)
      : Engine(config), assignment(std::move(assign)) {
    validate_assignment();
  }

  void validate_assignment() {
    const int m = task.size();
    if (static_cast<int>(assignment.stages_per_agent.size()) != n_agents)
      throw InvalidAssignment("assignment covers " +
                              std::to_string(assignment.stages_per_agent.size()) +
                              " agents, team has " + std::to_string(n_agents));
    std::vector<bool> covered(m, false);
    for (const auto& stages : assignment.stages_per_agent) {
      for (int s : stages) {
        if (s < 0 || s >= m)
          throw InvalidAssignment("stage index " + std::to_string(s) +
                                  " out of range");
        covered[s] = true;
      }
    }
    for (int s = 0; s < m; ++s)
      if (!covered[s])
        throw InvalidAssignment("stage " + std::to_string(s) +
                                " ('" + task.subtasks[s].id +
                                "') has no assigned agent");
  }

  void run() {
    const int m = task.size();
    struct AgentState {
      std::vector<int> scan;  // stages in reverse topological order
      bool working = false;
      int stage = -1;
      int job = -1;
      int work_left = 0;
      int switch_left = 0;
      int switch_stage = -1;
      int tooled_stage = -1;
    };
    std::vector<int> topo_rank(m);
    for (int r = 0; r < m; ++r) topo_rank[topo[r]] = r;

    std::vector<AgentState> agents(n_agents);
    for (int a = 0; a < n_agents; ++a) {
      agents[a].scan = assignment.stages_per_agent[a];
      std::sort(agents[a].scan.begin(), agents[a].scan.end(),
                [&](int x, int y) { return topo_rank[x] > topo_rank[y]; });
    }

    // ready[s]: jobs whose predecessors are all done, ascending
    std::vector<std::set<int>> ready(m);
    std::vector<std::vector<int>> done_preds(jobs, std::vector<int>(m, 0));
    std::vector<std::vector<char>> done(jobs, std::vector<char>(m, 0));
    std::vector<int> stages_done(jobs, 0);
    for (int s = 0; s < m; ++s)
      if (preds[s].empty())
        for (int j = 0; j < jobs; ++j) ready[s].insert(j);

    std::vector<std::int64_t> occupancy(m, 0);
    int completed = 0;
    long step = 0;
    long quiet_steps = 0;
    const long quiet_limit = watchdog_limit();

    while (completed < jobs) {
      bool progress = false;

      // claims, lowest agent index first
      for (int a = 0; a < n_agents; ++a) {
        AgentState& st = agents[a];
        if (st.working || st.switch_left > 0) continue;
        bool saw_full_stage = false;
        for (int s : st.scan) {
          if (ready[s].empty()) continue;
          if (occupancy[s] >= cap[s]) {
            saw_full_stage = true;
            continue;
          }
          if (switch_cost > 0 && st.tooled_stage != -1 && st.tooled_stage != s) {
            st.switch_left = switch_cost;
            st.switch_stage = s;
            break;
          }
          int job = *ready[s].begin();
          ready[s].erase(ready[s].begin());
          occupancy[s] += 1;
          st.working = true;
          st.stage = s;
          st.job = job;
          st.work_left = durations[s];
          st.tooled_stage = s;
          progress = true;
          break;
        }
        if (!st.working && st.switch_left == 0 && saw_full_stage)
          blocked_steps += 1;
      }

      // work
      for (int a = 0; a < n_agents; ++a) {
        AgentState& st = agents[a];
        if (st.switch_left > 0) {
          st.switch_left -= 1;
          if (st.switch_left == 0) {
            st.tooled_stage = st.switch_stage;
            st.switch_stage = -1;
          }
          progress = true;
        } else if (st.working) {
          st.work_left -= 1;
          progress = true;
          if (st.work_left == 0) {
            const int s = st.stage;
            st.working = false;
            occupancy[s] -= 1;
            counts[a][s] += 1;
            done[st.job][s] = 1;
            stages_done[st.job] += 1;
            if (stages_done[st.job] == m) {
              completed += 1;
              if (completed == jobs) makespan = step + 1;
            }
            for (int succ = 0; succ < m; ++succ) {
              if (done[st.job][succ]) continue;
              bool is_succ = false;
              for (int p : preds[succ])
                if (p == s) is_succ = true;
              if (!is_succ) continue;
              done_preds[st.job][succ] += 1;
              if (done_preds[st.job][succ] ==
                  static_cast<int>(preds[succ].size()))
                ready[succ].insert(st.job);
            }
            st.stage = -1;
            st.job = -1;
          }
        }
      }

      quiet_steps = progress ? 0 : quiet_steps + 1;
      if (quiet_steps > quiet_limit) {
        std::ostringstream out;
        out << "no progress for " << quiet_limit << " steps at step " << step
            << "; completed " << completed << "/" << jobs;
        throw Deadlock(out.str());
      }
      ++step;
    }
  }
};

SimResult finalize(const Engine& engine, PolicyKind policy, double speedup) {
  SimResult result;
  result.policy = policy;
  result.makespan = engine.makespan;
  result.throughput = static_cast<double>(engine.jobs) /
                      static_cast<double>(engine.makespan);
  result.speedup = speedup;
  result.idle_fraction =
      static_cast<double>(engine.blocked_steps) /
      (static_cast<double>(engine.n_agents) * static_cast<double>(engine.makespan));
  result.per_agent_subtask_counts = engine.counts;

  std::vector<std::vector<double>> active;
  for (const auto& row : engine.counts) {
    long total = std::accumulate(row.begin(), row.end(), 0L);
    if (total > 0) active.emplace_back(row.begin(), row.end());
  }
  result.si = active.size() >= 2 ? si_from_counts(active) : 0.0;
  return result;
}

void validate_config(const SimConfig& config) {
  config.task.validate();
  if (config.n_agents < 1) throw InvalidTeamSize("team size must be >= 1");
  if (config.jobs < 1) throw ValidationError("jobs must be >= 1");
  if (config.switch_cost < 0) throw ValidationError("switch cost must be >= 0");
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  validate_config(config);

  double baseline_throughput;
  if (config.n_agents == 1 && config.policy == PolicyKind::Generalist) {
    baseline_throughput = 0.0;  // this run is its own baseline
  } else {
    SimConfig base = config;
    base.n_agents = 1;
    base.policy = PolicyKind::Generalist;
    base.assignment.reset();
    baseline_throughput = simulate(base).throughput;
  }

  if (config.policy == PolicyKind::Generalist) {
    WaveEngine engine(config);
    engine.run();
    double speedup = baseline_throughput > 0.0
                         ? (static_cast<double>(config.jobs) /
                            static_cast<double>(engine.makespan)) /
                               baseline_throughput
                         : 1.0;
    return finalize(engine, config.policy, speedup);
  }

  SpecialistAssignment assignment;
  if (config.policy == PolicyKind::GreedySpecialist) {
    assignment.stages_per_agent.assign(config.n_agents, {});
    for (auto& stages : assignment.stages_per_agent) {
      stages.resize(config.task.size());
      std::iota(stages.begin(), stages.end(), 0);
    }
  } else {
    assignment = config.assignment
                     ? *config.assignment
                     : optimal_specialist_assignment(config.task, config.n_agents);
  }
  PipelineEngine engine(config, std::move(assignment));
  engine.run();
  double throughput = static_cast<double>(config.jobs) /
                      static_cast<double>(engine.makespan);
  double speedup =
      baseline_throughput > 0.0 ? throughput / baseline_throughput : 1.0;
  return finalize(engine, config.policy, speedup);
}

PolicyComparison compare_policies(const SimConfig& config) {
  PolicyComparison cmp;
  cmp.bound = parallelizability(config.task, config.n_agents).s;

  SimConfig c = config;
  c.policy = PolicyKind::Generalist;
  cmp.generalist = simulate(c);
  c.policy = PolicyKind::Specialist;
  cmp.specialist = simulate(c);
  c.policy = PolicyKind::GreedySpecialist;
  cmp.greedy = simulate(c);
  return cmp;
}

nlohmann::json sim_result_to_json(const SimResult& result) {
  return {{"policy", policy_name(result.policy)},
          {"makespan", result.makespan},
          {"throughput", result.throughput},
          {"speedup", result.speedup},
          {"idle_fraction", result.idle_fraction},
          {"per_agent_subtask_counts", result.per_agent_subtask_counts},
          {"si", result.si}};
}

nlohmann::json comparison_to_json(const PolicyComparison& cmp) {
  return {{"bound", cmp.bound},
          {"generalist", sim_result_to_json(cmp.generalist)},
          {"specialist", sim_result_to_json(cmp.specialist)},
          {"greedy_specialist", sim_result_to_json(cmp.greedy)}};
}

namespace {

std::string join_path(const std::string& base, const std::string& path) {
  if (path.empty() || path.front() == '/' || base.empty()) return path;
  return base + "/" + path;
}

}  // namespace

SimConfig parse_sim_spec(const nlohmann::json& j, const std::string& base_dir) {
  SimConfig config;

  TaskSpec task_spec;
  if (j.contains("task")) {
    task_spec = parse_task_spec(j.at("task"));
  } else if (j.contains("task_file")) {
    task_spec = load_task_spec(join_path(base_dir, j.at("task_file")));
  } else {
    throw ValidationError("sim spec needs 'task' or 'task_file'");
  }

  if (j.contains("layout_file")) {
    LayoutGraph graph =
        build_graph(load_layout(join_path(base_dir, j.at("layout_file"))));
    config.task = analyze_task(&graph, task_spec);
  } else {
    config.task = analyze_task(nullptr, task_spec);
  }

  config.n_agents = j.value("n_agents", 1);
  config.base_duration = j.value("duration", 10);
  config.jobs = j.value("jobs", 1);
  config.policy = policy_from_name(j.value("policy", "generalist"));
  config.switch_cost = j.value("switch_cost", 0);
  config.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("assignment")) {
    SpecialistAssignment assignment;
    for (const auto& stages : j.at("assignment"))
      assignment.stages_per_agent.push_back(stages.get<std::vector<int>>());
    config.assignment = std::move(assignment);
  }
  return config;
}

}  // namespace parlens
