#include "parlens/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parlens/specialization.hpp"

namespace parlens {

TaskGraph chain_task(const std::vector<int>& durations,
                     const std::vector<Capacity>& capacities) {
  if (durations.empty() || durations.size() != capacities.size())
    throw ValidationError("durations and capacities must be non-empty and equal length");
  double total = 0.0;
  for (int d : durations) {
    if (d < 1) throw ValidationError("stage durations must be >= 1");
    total += d;
  }
  TaskGraph task;
  for (size_t i = 0; i < durations.size(); ++i) {
    SubtaskProfile sub;
    sub.id = "stage-" + std::to_string(i);
    sub.fraction = durations[i] / total;
    sub.resource_capacity = capacities[i];
    sub.fixed_duration = durations[i];
    task.subtasks.push_back(std::move(sub));
    if (i + 1 < durations.size())
      task.precedence.insert({static_cast<int>(i), static_cast<int>(i + 1)});
  }
  task.validate();
  return task;
}

StageEnv::StageEnv(StageEnvParams params) : params_(std::move(params)) {
  const int m = static_cast<int>(params_.durations.size());
  if (m < 1 || params_.capacities.size() != params_.durations.size())
    throw ValidationError("stage env needs matching durations and capacities");
  if (params_.n_agents < 1) throw InvalidTeamSize("team size must be >= 1");
  if (params_.padding < 0) throw ValidationError("padding must be >= 0");
  if (params_.horizon < 1) throw ValidationError("horizon must be >= 1");
  if (params_.buffer_cap < 1) throw ValidationError("buffer capacity must be >= 1");

  max_duration_ = 0;
  for (int d : params_.durations) {
    if (d < 1) throw ValidationError("stage durations must be >= 1");
    max_duration_ = std::max(max_duration_, d);
  }
  occ_radix_.resize(m);
  long long states = (m + 1);
  states *= (max_duration_ + 1);
  for (int s = 0; s < m; ++s) {
    occ_radix_[s] =
        static_cast<int>(params_.capacities[s].clamp_to_team(params_.n_agents));
    states *= occ_radix_[s] + 1;
  }
  for (int s = 1; s < m; ++s) states *= params_.buffer_cap + 1;
  states *= params_.padding + 1;
  if (states > 100000)
    throw StateSpaceTooLarge("state space has " + std::to_string(states) +
                             " states (limit 100000)");
  n_states_ = static_cast<int>(states);

  phase_.assign(params_.n_agents, 0);
  remaining_.assign(params_.n_agents, 0);
  occupancy_.assign(m, 0);
  buffers_.assign(m, 0);
}

StageEnv StageEnv::from_task(const TaskGraph& task, int n_agents, int padding,
                             int horizon, int duration_scale) {
  const int m = task.size();
  std::set<std::pair<int, int>> chain;
  for (int i = 0; i + 1 < m; ++i) chain.insert({i, i + 1});
  if (task.precedence != chain)
    throw ValidationError("stage environments require a chain task");

  StageEnvParams params;
  for (const auto& sub : task.subtasks) {
    int d = sub.fixed_duration
                ? *sub.fixed_duration
                : std::max(1, static_cast<int>(
                                  std::lround(sub.fraction * duration_scale)));
    params.durations.push_back(d);
    params.capacities.push_back(sub.concurrency());
  }
  params.n_agents = n_agents;
  params.padding = padding;
  params.horizon = horizon;
  return StageEnv(params);
}

TaskGraph StageEnv::task() const {
  return chain_task(params_.durations, params_.capacities);
}

void StageEnv::reset(std::mt19937_64& rng) {
  std::fill(phase_.begin(), phase_.end(), 0);
  std::fill(remaining_.begin(), remaining_.end(), 0);
  std::fill(occupancy_.begin(), occupancy_.end(), 0);
  std::fill(buffers_.begin(), buffers_.end(), 0);
  pad_value_ = 0;
  if (params_.padding > 0) {
    std::uniform_int_distribution<int> dist(0, params_.padding);
    pad_value_ = dist(rng);
  }
}

StageEnv::StepResult StageEnv::step(const std::vector<int>& actions,
                                    std::mt19937_64& rng) {
  const int m = stages();
  if (static_cast<int>(actions.size()) != params_.n_agents)
    throw ValidationError("one action per agent required");
  StepResult result;
  result.stage_release.assign(params_.n_agents, -1);

  // entries
  for (int a = 0; a < params_.n_agents; ++a) {
    if (phase_[a] != 0) continue;
    int action = actions[a];
    if (action <= 0 || action > m) continue;
    int s = action - 1;
    if (occupancy_[s] >= occ_radix_[s]) continue;
    if (s > 0 && buffers_[s] == 0) continue;
    if (s > 0) buffers_[s] -= 1;
    occupancy_[s] += 1;
    phase_[a] = s + 1;
    remaining_[a] = params_.durations[s];
  }

  // work
  for (int a = 0; a < params_.n_agents; ++a)
    if (phase_[a] != 0 && remaining_[a] > 0) remaining_[a] -= 1;

  // releases; a full downstream buffer keeps the agent holding the stage
  for (int a = 0; a < params_.n_agents; ++a) {
    if (phase_[a] == 0 || remaining_[a] != 0) continue;
    int s = phase_[a] - 1;
    if (s == m - 1) {
      result.completions += 1;
      result.team_reward += 1.0;
    } else {
      if (buffers_[s + 1] >= params_.buffer_cap) continue;
      buffers_[s + 1] += 1;
    }
    occupancy_[s] -= 1;
    phase_[a] = 0;
    result.stage_release[a] = s;
  }

  if (params_.padding > 0) {
    std::uniform_int_distribution<int> dist(0, params_.padding);
    pad_value_ = dist(rng);
  }
  return result;
}

int StageEnv::observe(int agent) const {
  const int m = stages();
  long long code = phase_[agent];
  code = code * (max_duration_ + 1) + remaining_[agent];
  for (int s = 0; s < m; ++s) code = code * (occ_radix_[s] + 1) + occupancy_[s];
  for (int s = 1; s < m; ++s) code = code * (params_.buffer_cap + 1) + buffers_[s];
  code = code * (params_.padding + 1) + pad_value_;
  return static_cast<int>(code);
}

double shaping_coefficient(const QLearningConfig& config, int episode) {
  int horizon = config.shaping_horizon > 0 ? config.shaping_horizon
                                           : std::max(1, config.episodes / 2);
  return std::max(0.0, 1.0 - static_cast<double>(episode) / horizon);
}

double bellman_update(double q, double reward, double gamma, double max_next,
                      double alpha) {
  return q + alpha * (reward + gamma * max_next - q);
}

namespace {

double max_q(const std::vector<double>& table, int state, int n_actions) {
  double best = table[static_cast<size_t>(state) * n_actions];
  for (int u = 1; u < n_actions; ++u)
    best = std::max(best, table[static_cast<size_t>(state) * n_actions + u]);
  return best;
}

int argmax_q(const std::vector<double>& table, int state, int n_actions,
             std::mt19937_64& rng) {
  double best = max_q(table, state, n_actions);
  int ties = 0;
  for (int u = 0; u < n_actions; ++u)
    if (table[static_cast<size_t>(state) * n_actions + u] == best) ++ties;
  std::uniform_int_distribution<int> dist(0, ties - 1);
  int pick = dist(rng);
  for (int u = 0; u < n_actions; ++u) {
    if (table[static_cast<size_t>(state) * n_actions + u] == best) {
      if (pick == 0) return u;
      --pick;
    }
  }
  return 0;
}

}  // namespace

TrainResult train(StageEnv env, const QLearningConfig& config) {
  const int n_agents = env.agents();
  const int n_actions = env.action_count();
  const int n_states = env.state_count();
  const int steps =
      config.steps_per_episode > 0 ? config.steps_per_episode : env.params().horizon;
  int decay = config.epsilon_decay_episodes > 0
                  ? config.epsilon_decay_episodes
                  : std::max(1, config.episodes * 4 / 5);
  if (config.alpha <= 0.0 || config.alpha > 1.0)
    throw ValidationError("alpha must be in (0, 1]");
  if (config.gamma < 0.0 || config.gamma >= 1.0)
    throw InvalidDiscount("gamma must be in [0, 1)");

  TrainResult result;
  result.policies.n_actions = n_actions;
  result.policies.q.assign(
      n_agents, std::vector<double>(static_cast<size_t>(n_states) * n_actions, 0.0));
  auto& q = result.policies.q;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, n_actions - 1);

  std::vector<int> obs(n_agents), next_obs(n_agents), actions(n_agents);
  for (int episode = 0; episode < config.episodes; ++episode) {
    double frac = std::min(1.0, static_cast<double>(episode) / decay);
    double epsilon =
        config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start);
    double shape = shaping_coefficient(config, episode) * config.shaping;

    env.reset(rng);
    for (int a = 0; a < n_agents; ++a) obs[a] = env.observe(a);

    double episode_reward = 0.0;
    for (int t = 0; t < steps; ++t) {
      for (int a = 0; a < n_agents; ++a) {
        actions[a] = coin(rng) < epsilon
                         ? random_action(rng)
                         : argmax_q(q[a], obs[a], n_actions, rng);
      }
      auto outcome = env.step(actions, rng);
      episode_reward += outcome.team_reward;
      for (int a = 0; a < n_agents; ++a) {
        next_obs[a] = env.observe(a);
        double reward = outcome.team_reward +
                        (outcome.stage_release[a] >= 0 ? shape : 0.0);
        size_t idx = static_cast<size_t>(obs[a]) * n_actions + actions[a];
        q[a][idx] = bellman_update(q[a][idx], reward, config.gamma,
                                   max_q(q[a], next_obs[a], n_actions),
                                   config.alpha);
        obs[a] = next_obs[a];
      }
    }
    result.learning_curve.push_back(episode_reward);
  }
  return result;
}

EvalResult evaluate(const TrainedPolicies& policies, StageEnv env, int episodes,
                    std::uint64_t seed) {
  const int n_agents = env.agents();
  const int n_actions = env.action_count();
  EvalResult result;
  result.subtask_counts.assign(n_agents, std::vector<double>(env.stages(), 0.0));

  std::mt19937_64 rng(seed);
  std::vector<int> actions(n_agents);
  double total_reward = 0.0;
  for (int episode = 0; episode < episodes; ++episode) {
    env.reset(rng);
    for (int t = 0; t < env.params().horizon; ++t) {
      for (int a = 0; a < n_agents; ++a)
        actions[a] = argmax_q(policies.q[a], env.observe(a), n_actions, rng);
      auto outcome = env.step(actions, rng);
      total_reward += outcome.team_reward;
      for (int a = 0; a < n_agents; ++a)
        if (outcome.stage_release[a] >= 0)
          result.subtask_counts[a][outcome.stage_release[a]] += 1.0;
    }
  }
  result.mean_reward = total_reward / episodes;

  std::vector<std::vector<double>> active;
  for (const auto& row : result.subtask_counts) {
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (sum > 0.0) active.push_back(row);
  }
  if (active.size() >= 2 && total_reward > 0.0) {
    result.si = si_from_counts(active);
    result.si_valid = true;
  }
  return result;
}

std::vector<LearnerRow> run_learner_config(const std::string& env_id,
                                           const StageEnvParams& params,
                                           const QLearningConfig& config,
                                           const std::vector<std::uint64_t>& seeds,
                                           int eval_episodes,
                                           const std::string& recipe) {
  StageEnv env(params);
  double s = parallelizability(env.task(), params.n_agents).s;

  std::vector<LearnerRow> rows;
  for (std::uint64_t seed : seeds) {
    QLearningConfig run = config;
    run.seed = seed;
    auto trained = train(env, run);
    auto eval = evaluate(trained.policies, env, eval_episodes, seed + 1);

    LearnerRow row;
    row.env_id = env_id;
    row.s = s;
    row.n_agents = params.n_agents;
    row.padding = params.padding;
    row.recipe = recipe;
    row.seed = seed;
    row.si = eval.si;
    row.reward = eval.mean_reward;
    row.excluded = !eval.si_valid;
    rows.push_back(std::move(row));
  }
  return rows;
}

bool select_best_seed(const std::vector<LearnerRow>& rows, LearnerRow* out) {
  const LearnerRow* best = nullptr;
  for (const auto& row : rows) {
    if (row.excluded) continue;
    if (!best || row.reward > best->reward) best = &row;
  }
  if (!best) return false;
  *out = *best;
  double si_sum = 0.0;
  int ties = 0;
  for (const auto& row : rows) {
    if (row.excluded || row.reward != best->reward) continue;
    si_sum += row.si;
    ++ties;
  }
  out->si = si_sum / ties;
  return true;
}

std::vector<LearnerRow> state_size_sweep(const StageEnvParams& base,
                                         const std::vector<int>& padding_levels,
                                         const std::vector<RecipeVariant>& recipes,
                                         const std::vector<std::uint64_t>& seeds,
                                         const QLearningConfig& config,
                                         int eval_episodes) {
  std::vector<LearnerRow> rows;
  for (const auto& recipe : recipes) {
    for (int padding : padding_levels) {
      StageEnvParams params = base;
      if (!recipe.durations.empty()) {
        params.durations = recipe.durations;
        params.capacities = recipe.capacities;
      }
      params.padding = padding;
      std::string env_id = recipe.name + "-pad" + std::to_string(padding);
      auto batch = run_learner_config(env_id, params, config, seeds,
                                      eval_episodes, recipe.name);
      rows.insert(rows.end(), batch.begin(), batch.end());
    }
  }
  return rows;
}

}  // namespace parlens
