#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "parlens/contention_sim.hpp"

using namespace parlens;

namespace {

TaskGraph chain(std::vector<int> durations, std::vector<Capacity> caps) {
  TaskGraph task;
  double total = std::accumulate(durations.begin(), durations.end(), 0.0);
  for (size_t i = 0; i < durations.size(); ++i) {
    SubtaskProfile sub;
    sub.id = "s" + std::to_string(i);
    sub.fraction = durations[i] / total;
    sub.resource_capacity = caps[i];
    task.subtasks.push_back(std::move(sub));
    if (i + 1 < durations.size())
      task.precedence.insert({static_cast<int>(i), static_cast<int>(i + 1)});
  }
  return task;
}

SimConfig config_of(TaskGraph task, int n, int duration, int jobs,
                    PolicyKind policy) {
  SimConfig config;
  config.task = std::move(task);
  config.n_agents = n;
  config.base_duration = duration;
  config.jobs = jobs;
  config.policy = policy;
  return config;
}

struct RandomInstance {
  TaskGraph task;
  int n = 2;
  int duration = 0;
  int jobs = 0;
};

RandomInstance random_instance(std::mt19937_64& rng, bool force_bottleneck,
                               bool full_concurrency) {
  std::uniform_int_distribution<int> m_dist(2, 5);
  std::uniform_int_distribution<int> n_dist(2, 6);
  std::uniform_int_distribution<int> d_dist(1, 12);
  const int m = m_dist(rng);
  const int n = n_dist(rng);

  std::vector<int> durations;
  for (int i = 0; i < m; ++i) durations.push_back(d_dist(rng));
  std::vector<Capacity> caps;
  bool has_bottleneck = false;
  for (int i = 0; i < m; ++i) {
    if (full_concurrency) {
      std::uniform_int_distribution<int> c_dist(n, n + 3);
      caps.push_back(rng() % 2 == 0 ? Capacity::unbounded()
                                    : Capacity(c_dist(rng)));
    } else {
      std::uniform_int_distribution<int> c_dist(1, n + 2);
      int c = c_dist(rng);
      if (c < n) has_bottleneck = true;
      caps.push_back(c > n ? Capacity::unbounded() : Capacity(c));
    }
  }
  if (force_bottleneck && !has_bottleneck) {
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::uniform_int_distribution<int> c_dist(1, n - 1);
    caps[pick(rng)] = Capacity(c_dist(rng));
  }

  RandomInstance inst;
  inst.task = chain(durations, caps);
  inst.n = n;
  inst.duration = std::accumulate(durations.begin(), durations.end(), 0);
  std::uniform_int_distribution<int> wave_dist(3, 8);
  inst.jobs = n * wave_dist(rng);
  return inst;
}

}  // namespace

TEST_CASE("stage durations round and floor at one") {
  auto task = chain({1, 9}, {Capacity(1), Capacity(1)});
  auto d = stage_durations(task, 10);
  CHECK(d == std::vector<int>{1, 9});
  CHECK_THROWS_AS(stage_durations(task, 1), ValidationError);
}

TEST_CASE("full concurrency: two generalists double throughput") {
  auto cfg = config_of(chain({5, 5}, {Capacity::unbounded(), Capacity::unbounded()}),
                       2, 10, 20, PolicyKind::Generalist);
  auto result = simulate(cfg);
  CHECK(result.speedup == doctest::Approx(2.0).epsilon(0.05));
  CHECK(result.idle_fraction == 0.0);
  CHECK(result.si == 0.0);
}

TEST_CASE("unit capacities: generalists gain nothing") {
  auto cfg = config_of(chain({5, 5}, {Capacity(1), Capacity(1)}), 2, 10, 20,
                       PolicyKind::Generalist);
  auto result = simulate(cfg);
  double bound = parallelizability(cfg.task, 2).s;
  CHECK(bound == 1.0);
  CHECK(result.speedup <= bound + 2.0 / 20.0);
  CHECK(result.idle_fraction > 0.0);
}

TEST_CASE("unit capacities: a specialist pipeline doubles throughput") {
  auto cfg = config_of(chain({5, 5}, {Capacity(1), Capacity(1)}), 2, 10, 20,
                       PolicyKind::Specialist);
  auto result = simulate(cfg);
  CHECK(result.speedup == doctest::Approx(200.0 / 105.0).epsilon(1e-9));
  CHECK(result.si == 1.0);

  // step-level check against the flow-shop recurrence on small job counts
  for (int jobs = 1; jobs <= 5; ++jobs) {
    auto small = cfg;
    small.jobs = jobs;
    CHECK(simulate(small).makespan == oracles::flow_shop_makespan({5, 5}, jobs));
  }
}

TEST_CASE("pipeline makespan matches the flow-shop recurrence") {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> m_dist(2, 4);
  std::uniform_int_distribution<int> d_dist(1, 7);
  std::uniform_int_distribution<int> jobs_dist(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    int m = m_dist(rng);
    std::vector<int> durations;
    for (int i = 0; i < m; ++i) durations.push_back(d_dist(rng));
    std::vector<Capacity> caps(m, Capacity(1));
    auto task = chain(durations, caps);
    SimConfig cfg = config_of(task, m, std::accumulate(durations.begin(),
                                                       durations.end(), 0),
                              jobs_dist(rng), PolicyKind::Specialist);
    // one dedicated agent per stage
    SpecialistAssignment assignment;
    for (int i = 0; i < m; ++i) assignment.stages_per_agent.push_back({i});
    cfg.assignment = assignment;
    CHECK(simulate(cfg).makespan ==
          oracles::flow_shop_makespan(durations, cfg.jobs));
  }
}

TEST_CASE("optimal assignment: water-filling examples") {
  auto even = optimal_specialist_assignment(
      chain({5, 5}, {Capacity(1), Capacity(1)}), 2);
  CHECK(even.stages_per_agent == std::vector<std::vector<int>>{{0}, {1}});

  auto skew = optimal_specialist_assignment(
      chain({8, 2}, {Capacity::unbounded(), Capacity::unbounded()}), 5);
  int stage0 = 0, stage1 = 0;
  for (const auto& stages : skew.stages_per_agent) {
    REQUIRE(stages.size() == 1);
    (stages[0] == 0 ? stage0 : stage1) += 1;
  }
  CHECK(stage0 == 4);
  CHECK(stage1 == 1);

  auto solo = optimal_specialist_assignment(
      chain({5, 5}, {Capacity(1), Capacity(1)}), 1);
  REQUIRE(solo.stages_per_agent.size() == 1);
  CHECK(solo.stages_per_agent[0] == std::vector<int>{0, 1});
}

TEST_CASE("(4,1) split is makespan-optimal among all integer splits") {
  auto task = chain({8, 2}, {Capacity::unbounded(), Capacity::unbounded()});
  long best_makespan = std::numeric_limits<long>::max();
  int best_split = -1;
  for (int a = 1; a <= 4; ++a) {
    SimConfig cfg = config_of(task, 5, 10, 30, PolicyKind::Specialist);
    SpecialistAssignment assignment;
    for (int k = 0; k < a; ++k) assignment.stages_per_agent.push_back({0});
    for (int k = a; k < 5; ++k) assignment.stages_per_agent.push_back({1});
    cfg.assignment = assignment;
    long makespan = simulate(cfg).makespan;
    if (makespan < best_makespan) {
      best_makespan = makespan;
      best_split = a;
    }
  }
  CHECK(best_split == 4);

  SimConfig optimal = config_of(task, 5, 10, 30, PolicyKind::Specialist);
  CHECK(simulate(optimal).makespan == best_makespan);
}

TEST_CASE("invalid assignments are rejected") {
  auto task = chain({5, 5}, {Capacity(1), Capacity(1)});
  SimConfig cfg = config_of(task, 2, 10, 4, PolicyKind::Specialist);
  SpecialistAssignment missing;
  missing.stages_per_agent = {{0}, {0}};  // stage 1 uncovered
  cfg.assignment = missing;
  CHECK_THROWS_AS(simulate(cfg), InvalidAssignment);

  SpecialistAssignment out_of_range;
  out_of_range.stages_per_agent = {{0}, {7}};
  cfg.assignment = out_of_range;
  CHECK_THROWS_AS(simulate(cfg), InvalidAssignment);
}

TEST_CASE("policy comparison on the proposition regimes") {
  // full concurrency: generalists at least match specialists
  auto open = config_of(chain({5, 5}, {Capacity::unbounded(), Capacity::unbounded()}),
                        2, 10, 20, PolicyKind::Generalist);
  auto cmp_open = compare_policies(open);
  CHECK(cmp_open.bound == 2.0);
  CHECK(cmp_open.generalist.throughput >= cmp_open.specialist.throughput - 1e-12);

  // unit capacity: specialists win
  auto tight = config_of(chain({5, 5}, {Capacity(1), Capacity(1)}), 2, 10, 20,
                         PolicyKind::Generalist);
  auto cmp_tight = compare_policies(tight);
  CHECK(cmp_tight.bound == 1.0);
  CHECK(cmp_tight.specialist.throughput > cmp_tight.generalist.throughput);

  // SMAC-like: m = 3 open stages, N = 4
  auto smac = config_of(chain({3, 3, 3}, {Capacity::unbounded(),
                                          Capacity::unbounded(),
                                          Capacity::unbounded()}),
                        4, 9, 20, PolicyKind::Generalist);
  CHECK(compare_policies(smac).generalist.speedup ==
        doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("bound validity on random instances") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = random_instance(rng, false, false);
    auto cfg = config_of(inst.task, inst.n, inst.duration, inst.jobs,
                         PolicyKind::Generalist);
    auto result = simulate(cfg);
    double bound = parallelizability(inst.task, inst.n).s;
    double tolerance =
        static_cast<double>(inst.task.size()) / static_cast<double>(inst.jobs);
    CHECK(result.speedup <= bound + tolerance);
  }
}

TEST_CASE("proposition 2 behavioral: full concurrency") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng, false, true);
    auto result = simulate(config_of(inst.task, inst.n, inst.duration,
                                     inst.jobs, PolicyKind::Generalist));
    double tolerance =
        static_cast<double>(inst.task.size()) / static_cast<double>(inst.jobs);
    CHECK(result.speedup >= inst.n - tolerance);
    CHECK(result.si == 0.0);
    CHECK(result.idle_fraction == 0.0);
  }
}

TEST_CASE("proposition 3 behavioral: bottlenecks idle generalists") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng, true, false);
    double bound = parallelizability(inst.task, inst.n).s;
    REQUIRE(bound < inst.n);
    auto base = config_of(inst.task, inst.n, inst.duration, inst.jobs,
                          PolicyKind::Generalist);
    auto cmp = compare_policies(base);
    CHECK(cmp.generalist.idle_fraction > 0.0);
    double best_specialist =
        std::max(cmp.specialist.throughput, cmp.greedy.throughput);
    CHECK(best_specialist >= cmp.generalist.throughput - 1e-12);
  }
}

TEST_CASE("conservation: every stage of every job is executed once") {
  std::mt19937_64 rng(80);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, false, false);
    for (auto policy : {PolicyKind::Generalist, PolicyKind::Specialist,
                        PolicyKind::GreedySpecialist}) {
      auto result = simulate(
          config_of(inst.task, inst.n, inst.duration, inst.jobs, policy));
      for (int s = 0; s < inst.task.size(); ++s) {
        long total = 0;
        for (const auto& row : result.per_agent_subtask_counts) total += row[s];
        CHECK(total == inst.jobs);
      }
      CHECK(result.idle_fraction >= 0.0);
      CHECK(result.idle_fraction <= 1.0);
    }
  }
}

TEST_CASE("determinism: identical configs give identical results") {
  auto inst = chain({3, 7, 2}, {Capacity(1), Capacity(2), Capacity::unbounded()});
  for (auto policy : {PolicyKind::Generalist, PolicyKind::Specialist,
                      PolicyKind::GreedySpecialist}) {
    auto cfg = config_of(inst, 3, 12, 12, policy);
    auto a = simulate(cfg);
    auto b = simulate(cfg);
    CHECK(a.makespan == b.makespan);
    CHECK(a.throughput == b.throughput);
    CHECK(a.speedup == b.speedup);
    CHECK(a.idle_fraction == b.idle_fraction);
    CHECK(a.si == b.si);
    CHECK(a.per_agent_subtask_counts == b.per_agent_subtask_counts);
  }
}

TEST_CASE("switch costs make specialists strictly better on tight stages") {
  auto task = chain({5, 5}, {Capacity(1), Capacity(1)});
  SimConfig cfg = config_of(task, 2, 10, 20, PolicyKind::Generalist);
  cfg.switch_cost = 6;  // larger than any stage duration
  auto cmp = compare_policies(cfg);
  CHECK(cmp.specialist.throughput > cmp.generalist.throughput);
}

TEST_CASE("non-chain DAGs simulate correctly") {
  // diamond: two independent prep stages feed a final stage
  TaskGraph task;
  for (int i = 0; i < 3; ++i) {
    SubtaskProfile sub;
    sub.id = "s" + std::to_string(i);
    sub.fraction = 1.0 / 3.0;
    sub.resource_capacity = Capacity::unbounded();
    task.subtasks.push_back(std::move(sub));
  }
  task.precedence = {{0, 2}, {1, 2}};
  auto result = simulate(config_of(task, 3, 9, 9, PolicyKind::GreedySpecialist));
  CHECK(result.throughput > 0.0);
  for (int s = 0; s < 3; ++s) {
    long total = 0;
    for (const auto& row : result.per_agent_subtask_counts) total += row[s];
    CHECK(total == 9);
  }
}
