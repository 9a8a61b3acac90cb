#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "parlens/task_model.hpp"

namespace parlens {

/// Chain TaskGraph from integer stage durations: f_i = d_i / sum(d), with
/// i -> i+1 precedence. The learner environments are built on these.
TaskGraph chain_task(const std::vector<int>& durations,
                     const std::vector<Capacity>& capacities);

struct StageEnvParams {
  std::vector<int> durations;          // steps of work per stage, >= 1
  std::vector<Capacity> capacities;    // C_i
  int n_agents = 2;
  int padding = 0;      // extra task-irrelevant state values (0 = none)
  int horizon = 40;     // steps per episode
  int buffer_cap = 2;   // finished work waiting between stages
};

/// Dec-MDP over a chain of subtasks. Agents enter a stage (capacity and
/// input-buffer permitting), work it for its duration, and release the job
/// downstream; completing the final stage earns the shared +1. Each agent
/// observes its own phase and remaining work, the per-stage occupancy,
/// the inter-stage buffer fill, and a task-irrelevant padding value that
/// inflates the state space without changing the dynamics.
class StageEnv {
 public:
  explicit StageEnv(StageEnvParams params);

  /// Build from a TaskGraph whose precedence is a chain (or empty with one
  /// subtask); durations are max(1, round(f_i * duration_scale)).
  static StageEnv from_task(const TaskGraph& task, int n_agents, int padding,
                            int horizon, int duration_scale);

  const StageEnvParams& params() const { return params_; }
  int stages() const { return static_cast<int>(params_.durations.size()); }
  int agents() const { return params_.n_agents; }
  int action_count() const { return stages() + 1; }  // noop + enter(s)
  int state_count() const { return n_states_; }

  /// Analytic counterpart of this environment for S(N, C).
  TaskGraph task() const;

  void reset(std::mt19937_64& rng);

  struct StepResult {
    double team_reward = 0.0;          // completed jobs this step
    int completions = 0;
    std::vector<int> stage_release;    // per agent: stage released, or -1
  };
  StepResult step(const std::vector<int>& actions, std::mt19937_64& rng);

  int observe(int agent) const;

  // test hooks
  const std::vector<int>& occupancy() const { return occupancy_; }
  const std::vector<int>& buffers() const { return buffers_; }
  int agent_stage(int agent) const { return phase_[agent] - 1; }

 private:
  StageEnvParams params_;
  int n_states_ = 0;
  int max_duration_ = 0;
  std::vector<int> occ_radix_;

  std::vector<int> phase_;      // 0 = idle, s+1 = in stage s
  std::vector<int> remaining_;  // steps of work left; 0 while release blocked
  std::vector<int> occupancy_;  // per stage
  std::vector<int> buffers_;    // buffers_[s]: jobs waiting to enter stage s (s >= 1)
  int pad_value_ = 0;
};

struct QLearningConfig {
  int episodes = 2000;
  int steps_per_episode = 0;  // 0: use the environment horizon
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = 0;  // 0: 80% of episodes
  double shaping = 0.3;            // per-stage-completion bonus r_s
  int shaping_horizon = 0;         // episodes to anneal over; 0: half the run
  std::uint64_t seed = 0;
};

/// Linear annealing factor for the shaping bonus at a given episode.
double shaping_coefficient(const QLearningConfig& config, int episode);

/// One tabular Q-learning step toward the Bellman target.
double bellman_update(double q, double reward, double gamma, double max_next,
                      double alpha);

struct TrainedPolicies {
  std::vector<std::vector<double>> q;  // [agent][state * n_actions + action]
  int n_actions = 0;
};

struct TrainResult {
  TrainedPolicies policies;
  std::vector<double> learning_curve;  // team reward per episode
};

/// Independent epsilon-greedy Q-learning, one table per agent, deterministic
/// given the seed. Throws StateSpaceTooLarge above 1e5 states.
TrainResult train(StageEnv env, const QLearningConfig& config);

struct EvalResult {
  double si = 0.0;
  bool si_valid = false;  // at least two agents completed work, reward > 0
  double mean_reward = 0.0;
  std::vector<std::vector<double>> subtask_counts;  // [agent][stage]
};

/// Greedy rollouts of trained policies; Q-ties break uniformly at random
/// from the evaluation seed.
EvalResult evaluate(const TrainedPolicies& policies, StageEnv env,
                    int episodes, std::uint64_t seed);

struct LearnerRow {
  std::string env_id;
  double s = 1.0;
  int n_agents = 0;
  int padding = 0;
  std::string recipe;
  std::uint64_t seed = 0;
  double si = 0.0;
  double reward = 0.0;
  bool excluded = false;  // zero reward or no measurable SI
};

/// Train + evaluate one environment across seeds; one row per seed.
std::vector<LearnerRow> run_learner_config(const std::string& env_id,
                                           const StageEnvParams& params,
                                           const QLearningConfig& config,
                                           const std::vector<std::uint64_t>& seeds,
                                           int eval_episodes,
                                           const std::string& recipe = "");

/// Highest-reward seed among non-excluded rows; exact reward ties average
/// their SI. Returns false when every seed is excluded.
bool select_best_seed(const std::vector<LearnerRow>& rows, LearnerRow* out);

struct RecipeVariant {
  std::string name;
  std::vector<int> durations;
  std::vector<Capacity> capacities;
};

/// The state-space-size experiment: same task at growing padding levels.
/// Padding level 0 is exactly the base environment.
std::vector<LearnerRow> state_size_sweep(const StageEnvParams& base,
                                         const std::vector<int>& padding_levels,
                                         const std::vector<RecipeVariant>& recipes,
                                         const std::vector<std::uint64_t>& seeds,
                                         const QLearningConfig& config,
                                         int eval_episodes);

}  // namespace parlens
