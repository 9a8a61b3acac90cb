#include <doctest.h>

#include <numeric>
#include <random>

#include "parlens/learners.hpp"

using namespace parlens;

namespace {

StageEnvParams tight_params() {
  StageEnvParams params;
  params.durations = {2, 2};
  params.capacities = {Capacity(1), Capacity(1)};
  params.n_agents = 2;
  params.horizon = 40;
  return params;
}

StageEnvParams open_params() {
  StageEnvParams params;
  params.durations = {2, 2};
  params.capacities = {Capacity::unbounded(), Capacity::unbounded()};
  params.n_agents = 2;
  params.horizon = 40;
  return params;
}

QLearningConfig quick_config(std::uint64_t seed) {
  QLearningConfig config;
  config.episodes = 1500;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("chain task fractions are exact duration ratios") {
  auto task = chain_task({1, 3}, {Capacity(1), Capacity::unbounded()});
  CHECK(task.subtasks[0].fraction == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(task.subtasks[1].fraction == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(task.precedence == std::set<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("state space accounting and the hard limit") {
  StageEnv env(tight_params());
  CHECK(env.action_count() == 3);
  // phase(3) * remaining(3) * occ(2*2) * buffer(3) * padding(1)
  CHECK(env.state_count() == 3 * 3 * 4 * 3);

  StageEnvParams big = tight_params();
  big.durations = {9, 9, 9, 9};
  big.capacities = std::vector<Capacity>(4, Capacity::unbounded());
  big.n_agents = 6;
  big.padding = 40;
  CHECK_THROWS_AS(StageEnv(big), StateSpaceTooLarge);
}

TEST_CASE("padding level zero is exactly the base environment") {
  StageEnvParams base = tight_params();
  StageEnvParams padded = base;
  padded.padding = 0;
  CHECK(StageEnv(base).state_count() == StageEnv(padded).state_count());

  // padding inflates states without touching dynamics
  padded.padding = 3;
  StageEnv env(padded);
  CHECK(env.state_count() == StageEnv(base).state_count() * 4);
}

TEST_CASE("environment respects capacities and conserves work") {
  StageEnvParams params = tight_params();
  StageEnv env(params);
  std::mt19937_64 rng(1);
  env.reset(rng);

  // both agents try to enter stage 0; capacity 1 admits only the first
  auto r1 = env.step({1, 1}, rng);
  CHECK(env.occupancy()[0] == 1);
  CHECK(env.agent_stage(0) == 0);
  CHECK(env.agent_stage(1) == -1);
  CHECK(r1.completions == 0);

  auto r2 = env.step({0, 1}, rng);  // agent 0 finishes stage 0 this step
  CHECK(r2.stage_release[0] == 0);
  CHECK(env.buffers()[1] == 1);

  auto r3 = env.step({2, 2}, rng);  // agent 0 picks up the handoff
  CHECK(env.agent_stage(0) == 1);
  auto r4 = env.step({0, 0}, rng);
  CHECK(r4.completions == 1);
  CHECK(r4.team_reward == 1.0);
}

TEST_CASE("random rollouts never violate stage capacity") {
  StageEnvParams params;
  params.durations = {1, 2, 1};
  params.capacities = {Capacity(1), Capacity(2), Capacity(1)};
  params.n_agents = 3;
  params.horizon = 50;
  StageEnv env(params);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> act(0, env.action_count() - 1);
  for (int episode = 0; episode < 20; ++episode) {
    env.reset(rng);
    for (int t = 0; t < params.horizon; ++t) {
      env.step({act(rng), act(rng), act(rng)}, rng);
      CHECK(env.occupancy()[0] <= 1);
      CHECK(env.occupancy()[1] <= 2);
      CHECK(env.occupancy()[2] <= 1);
    }
  }
}

TEST_CASE("bellman update matches an independent computation") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    double q = u(rng), r = u(rng), next = u(rng);
    double gamma = unit(rng) * 0.99, alpha = unit(rng) * 0.9 + 0.05;
    double expected = (1.0 - alpha) * q + alpha * (r + gamma * next);
    CHECK(bellman_update(q, r, gamma, next, alpha) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("shaping anneals linearly to zero") {
  QLearningConfig config;
  config.episodes = 100;
  config.shaping_horizon = 50;
  CHECK(shaping_coefficient(config, 0) == 1.0);
  CHECK(shaping_coefficient(config, 25) == doctest::Approx(0.5));
  CHECK(shaping_coefficient(config, 50) == 0.0);
  CHECK(shaping_coefficient(config, 99) == 0.0);
}

TEST_CASE("single agent, single stage learns to work") {
  StageEnvParams params;
  params.durations = {1};
  params.capacities = {Capacity(1)};
  params.n_agents = 1;
  params.horizon = 20;
  auto trained = train(StageEnv(params), quick_config(3));
  auto eval = evaluate(trained.policies, StageEnv(params), 10, 99);
  CHECK(eval.mean_reward > 0.0);
}

TEST_CASE("training is reproducible for identical seeds") {
  auto params = tight_params();
  auto a = train(StageEnv(params), quick_config(17));
  auto b = train(StageEnv(params), quick_config(17));
  CHECK(a.policies.q == b.policies.q);
  CHECK(a.learning_curve == b.learning_curve);

  auto c = train(StageEnv(params), quick_config(18));
  CHECK(a.policies.q != c.policies.q);
}

TEST_CASE("full concurrency teams approach simulator throughput") {
  auto params = open_params();
  auto trained = train(StageEnv(params), quick_config(5));
  auto eval = evaluate(trained.policies, StageEnv(params), 20, 123);
  // two agents, 4 steps of work per job, horizon 40: about 18 jobs possible
  CHECK(eval.mean_reward > 9.0);
}

TEST_CASE("hand-coded disjoint stage assignments evaluate to SI = 1") {
  auto params = open_params();
  StageEnv env(params);
  TrainedPolicies policies;
  policies.n_actions = env.action_count();
  policies.q.assign(2, std::vector<double>(
                           static_cast<size_t>(env.state_count()) *
                               env.action_count(),
                           0.0));
  // agent 0 always wants stage 0, agent 1 always wants stage 1
  for (int s = 0; s < env.state_count(); ++s) {
    policies.q[0][static_cast<size_t>(s) * 3 + 1] = 1.0;
    policies.q[1][static_cast<size_t>(s) * 3 + 2] = 1.0;
  }
  auto eval = evaluate(policies, env, 10, 5);
  CHECK(eval.mean_reward > 0.0);
  CHECK(eval.si == 1.0);
}

TEST_CASE("identical policies evaluate to SI = 0") {
  auto params = open_params();
  auto trained = train(StageEnv(params), quick_config(21));
  trained.policies.q[1] = trained.policies.q[0];  // clone agent 0's policy
  auto eval = evaluate(trained.policies, StageEnv(params), 10, 31);
  CHECK(eval.mean_reward > 0.0);
  // identical deterministic policies act in lockstep under full concurrency
  CHECK(eval.si == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("unit capacities drive learned specialization above open rooms") {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
  QLearningConfig config;
  config.episodes = 1500;

  auto tight_rows =
      run_learner_config("tight", tight_params(), config, seeds, 20);
  auto open_rows = run_learner_config("open", open_params(), config, seeds, 20);

  LearnerRow tight_best, open_best;
  REQUIRE(select_best_seed(tight_rows, &tight_best));
  REQUIRE(select_best_seed(open_rows, &open_best));
  CHECK(tight_best.si > open_best.si);
  CHECK(tight_best.si > 0.5);
}

TEST_CASE("state size sweep produces the full row grid") {
  StageEnvParams base = open_params();
  QLearningConfig config;
  config.episodes = 200;  // shape check only
  std::vector<RecipeVariant> recipes{{"short", {1, 1},
                                      {Capacity::unbounded(), Capacity::unbounded()}}};
  auto rows = state_size_sweep(base, {0, 1, 2}, recipes, {1, 2}, config, 5);
  CHECK(rows.size() == 6);
  CHECK(rows[0].padding == 0);
  CHECK(rows[0].env_id == "short-pad0");
}
