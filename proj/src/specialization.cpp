#include "parlens/specialization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace parlens {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

TrajectoryLog TrajectoryLog::from_csv(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"agent", "t", "state", "action"})
        throw ValidationError("trajectory CSV must start with header "
                              "agent,t,state,action");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4)
      throw ValidationError("line " + std::to_string(lineno) +
                            ": expected 4 fields");
    TrajectoryStep step;
    try {
      step.t = std::stol(fields[1]);
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": step index '" + fields[1] + "' is not an integer");
    }
    step.state = fields[2];
    step.action = fields[3];
    log.agents[fields[0]].push_back(std::move(step));
  }
  if (!header_seen) throw ValidationError("trajectory CSV is empty");
  log.validate();
  return log;
}

TrajectoryLog TrajectoryLog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trajectory log '" + path + "'");
  return from_csv(in);
}

void TrajectoryLog::validate() const {
  for (const auto& [agent, steps] : agents) {
    if (steps.empty()) throw EmptyTrajectory("agent '" + agent + "' has no steps");
    for (size_t k = 1; k < steps.size(); ++k) {
      if (steps[k].t <= steps[k - 1].t)
        throw ValidationError("agent '" + agent +
                              "': step indices must be strictly increasing");
    }
  }
}

std::vector<std::string> TrajectoryLog::agent_ids() const {
  std::vector<std::string> ids;
  for (const auto& [agent, _] : agents) ids.push_back(agent);
  return ids;
}

std::vector<std::string> TrajectoryLog::action_alphabet() const {
  std::set<std::string> actions;
  for (const auto& [_, steps] : agents)
    for (const auto& step : steps) actions.insert(step.action);
  return {actions.begin(), actions.end()};
}

ActionDistribution visitation_distribution(const TrajectoryLog& log,
                                           const std::string& agent,
                                           double gamma) {
  if (gamma < 0.0 || gamma >= 1.0)
    throw InvalidDiscount("discount must be in [0, 1), got " +
                          std::to_string(gamma));
  auto it = log.agents.find(agent);
  if (it == log.agents.end() || it->second.empty())
    throw EmptyTrajectory("agent '" + agent + "' has no recorded steps");

  ActionDistribution dist;
  dist.support = log.action_alphabet();
  dist.probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dist.support.size()));

  std::map<std::string, Eigen::Index> index;
  for (size_t k = 0; k < dist.support.size(); ++k)
    index[dist.support[k]] = static_cast<Eigen::Index>(k);

  const long t0 = it->second.front().t;
  double total = 0.0;
  for (const auto& step : it->second) {
    long rel = step.t - t0;
    double w = rel == 0 ? 1.0 : std::pow(gamma, static_cast<double>(rel));
    dist.probs[index.at(step.action)] += w;
    total += w;
  }
  dist.probs /= total;
  return dist;
}

namespace {

void check_alphabets(const std::vector<ActionDistribution>& dists) {
  if (dists.size() < 2)
    throw TooFewDistributions("need at least 2 distributions, got " +
                              std::to_string(dists.size()));
  for (size_t i = 1; i < dists.size(); ++i) {
    if (dists[i].support != dists[0].support ||
        dists[i].probs.size() != dists[0].probs.size())
      throw AlphabetMismatch("distributions must share one ordered alphabet");
  }
}

bool all_identical(const std::vector<ActionDistribution>& dists) {
  for (size_t i = 1; i < dists.size(); ++i)
    if (dists[i].probs != dists[0].probs) return false;
  return true;
}

bool pairwise_disjoint(const std::vector<ActionDistribution>& dists) {
  for (Eigen::Index a = 0; a < dists[0].probs.size(); ++a) {
    int owners = 0;
    for (const auto& d : dists)
      if (d.probs[a] > 0.0) ++owners;
    if (owners > 1) return false;
  }
  return true;
}

}  // namespace

double jsd(const std::vector<ActionDistribution>& dists) {
  check_alphabets(dists);
  const auto n = static_cast<double>(dists.size());

  // Exact endpoints: identical inputs have zero divergence, and when every
  // atom belongs to a single agent each KL term collapses to log2(N).
  if (all_identical(dists)) return 0.0;
  if (pairwise_disjoint(dists)) return std::log2(n);

  Eigen::VectorXd mixture = Eigen::VectorXd::Zero(dists[0].probs.size());
  for (const auto& d : dists) mixture += d.probs;
  mixture /= n;

  double total = 0.0;
  for (const auto& d : dists) {
    double kl = 0.0;
    for (Eigen::Index a = 0; a < d.probs.size(); ++a) {
      double p = d.probs[a];
      if (p > 0.0) kl += p * std::log2(p / mixture[a]);  // M(a) > 0 here
    }
    total += kl;
  }
  return total / n;
}

double si(const std::vector<ActionDistribution>& dists) {
  double divergence = jsd(dists);
  if (divergence == 0.0) return 0.0;
  double norm = std::log2(static_cast<double>(dists.size()));
  if (pairwise_disjoint(dists)) return 1.0;
  return divergence / norm;
}

double si_from_counts(const std::vector<std::vector<double>>& counts) {
  if (counts.size() < 2)
    throw TooFewDistributions("need counts for at least 2 agents");
  size_t width = counts[0].size();
  std::vector<std::string> support;
  for (size_t a = 0; a < width; ++a) support.push_back(std::to_string(a));

  std::vector<ActionDistribution> dists;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != width)
      throw AlphabetMismatch("count vectors must have equal length");
    double total = 0.0;
    for (double c : counts[i]) {
      if (c < 0.0) throw ValidationError("counts must be non-negative");
      total += c;
    }
    if (total <= 0.0)
      throw ZeroCounts("agent " + std::to_string(i) + " has zero total count");
    ActionDistribution dist;
    dist.support = support;
    dist.probs = Eigen::VectorXd(static_cast<Eigen::Index>(width));
    for (size_t a = 0; a < width; ++a)
      dist.probs[static_cast<Eigen::Index>(a)] = counts[i][a] / total;
    dists.push_back(std::move(dist));
  }
  return si(dists);
}

nlohmann::json si_report_json(const std::vector<std::string>& agent_ids,
                              const std::vector<ActionDistribution>& dists) {
  nlohmann::json per_agent = nlohmann::json::object();
  for (size_t i = 0; i < dists.size(); ++i) {
    nlohmann::json probs = nlohmann::json::object();
    for (size_t a = 0; a < dists[i].support.size(); ++a)
      probs[dists[i].support[a]] = dists[i].probs[static_cast<Eigen::Index>(a)];
    per_agent[agent_ids[i]] = probs;
  }
  return {{"si", si(dists)},
          {"jsd_bits", jsd(dists)},
          {"per_agent_distributions", per_agent}};
}

}  // namespace parlens
