#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "parlens/specialization.hpp"

using namespace parlens;

namespace {

ActionDistribution dist_of(std::vector<double> probs) {
  ActionDistribution d;
  for (size_t i = 0; i < probs.size(); ++i)
    d.support.push_back(std::string(1, static_cast<char>('a' + i)));
  d.probs = Eigen::Map<Eigen::VectorXd>(probs.data(),
                                        static_cast<Eigen::Index>(probs.size()));
  return d;
}

std::vector<std::vector<double>> as_raw(const std::vector<ActionDistribution>& ds) {
  std::vector<std::vector<double>> raw;
  for (const auto& d : ds)
    raw.emplace_back(d.probs.data(), d.probs.data() + d.probs.size());
  return raw;
}

}  // namespace

TEST_CASE("trajectory log parsing and validation") {
  std::istringstream in(
      "agent,t,state,action\n"
      "a,0,s0,x\n"
      "a,1,s1,y\n"
      "b,0,s0,y\n");
  auto log = TrajectoryLog::from_csv(in);
  CHECK(log.agent_ids() == std::vector<std::string>{"a", "b"});
  CHECK(log.action_alphabet() == std::vector<std::string>{"x", "y"});

  std::istringstream bad(
      "agent,t,state,action\n"
      "a,1,s0,x\n"
      "a,1,s1,y\n");
  CHECK_THROWS_AS(TrajectoryLog::from_csv(bad), ValidationError);
}

TEST_CASE("constant action gives a point mass for any discount") {
  TrajectoryLog log;
  for (long t = 0; t < 6; ++t) log.agents["a"].push_back({t, "s", "go"});
  log.agents["b"].push_back({0, "s", "stop"});
  for (double gamma : {0.0, 0.5, 0.99}) {
    auto d = visitation_distribution(log, "a", gamma);
    REQUIRE(d.support == std::vector<std::string>{"go", "stop"});
    CHECK(d.probs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.probs[1] == 0.0);
  }
}

TEST_CASE("gamma = 0 keeps only the first step") {
  TrajectoryLog log;
  log.agents["a"] = {{0, "s", "x"}, {1, "s", "y"}, {2, "s", "y"}};
  log.agents["b"] = {{0, "s", "y"}};
  auto d = visitation_distribution(log, "a", 0.0);
  CHECK(d.probs[0] == 1.0);  // action "x"
  CHECK(d.probs[1] == 0.0);
}

TEST_CASE("two-step log at gamma 0.5 weighs steps 2:1") {
  TrajectoryLog log;
  log.agents["a"] = {{0, "s", "a0"}, {1, "s", "a1"}};
  auto d = visitation_distribution(log, "a", 0.5);
  CHECK(d.probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d.probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("visitation rejects bad inputs") {
  TrajectoryLog log;
  log.agents["a"] = {{0, "s", "x"}};
  CHECK_THROWS_AS(visitation_distribution(log, "a", 1.0), InvalidDiscount);
  CHECK_THROWS_AS(visitation_distribution(log, "missing", 0.9), EmptyTrajectory);
}

TEST_CASE("jsd endpoints") {
  auto p = dist_of({0.3, 0.7});
  CHECK(jsd({p, p}) == 0.0);
  CHECK(si({p, p}) == 0.0);

  auto a = dist_of({1.0, 0.0});
  auto b = dist_of({0.0, 1.0});
  CHECK(jsd({a, b}) == 1.0);
  CHECK(si({a, b}) == 1.0);

  auto x = dist_of({1.0, 0.0, 0.0});
  auto y = dist_of({0.0, 1.0, 0.0});
  auto z = dist_of({0.0, 0.0, 1.0});
  CHECK(jsd({x, y, z}) == doctest::Approx(std::log2(3.0)).epsilon(1e-15));
  CHECK(si({x, y, z}) == 1.0);
}

TEST_CASE("jsd hand value: (1,0) vs (0.5,0.5)") {
  auto a = dist_of({1.0, 0.0});
  auto b = dist_of({0.5, 0.5});
  CHECK(jsd({a, b}) == doctest::Approx(0.31128).epsilon(1e-4));
}

TEST_CASE("jsd input validation") {
  auto a = dist_of({1.0, 0.0});
  CHECK_THROWS_AS(jsd({a}), TooFewDistributions);
  auto b = dist_of({0.5, 0.25, 0.25});
  CHECK_THROWS_AS(jsd({a, b}), AlphabetMismatch);
}

TEST_CASE("si_from_counts hand values") {
  CHECK(si_from_counts({{10, 0}, {0, 10}}) == 1.0);
  CHECK(si_from_counts({{5, 5}, {5, 5}}) == 0.0);
  CHECK(si_from_counts({{8, 2}, {2, 8}}) ==
        doctest::Approx(0.27807).epsilon(1e-4));
  CHECK_THROWS_AS(si_from_counts({{1, 0}, {0, 0}}), ZeroCounts);
}

TEST_CASE("jsd and si match the entropy-identity oracle on random tuples") {
  std::mt19937_64 rng(314159);
  std::uniform_int_distribution<int> n_dist(2, 6);
  std::uniform_int_distribution<int> width_dist(2, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = n_dist(rng);
    int width = width_dist(rng);
    std::vector<ActionDistribution> dists;
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(width);
      double total = 0.0;
      for (double& v : p) {
        v = u(rng) < 0.2 ? 0.0 : u(rng);  // occasional zero atoms
        total += v;
      }
      if (total == 0.0) {
        p[0] = 1.0;
        total = 1.0;
      }
      for (double& v : p) v /= total;
      dists.push_back(dist_of(p));
    }
    double expected = oracles::jsd_entropy_oracle(as_raw(dists));
    CHECK(jsd(dists) == doctest::Approx(expected).epsilon(1e-9));
    double s = si(dists);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0 + 1e-12);
    CHECK(s == doctest::Approx(expected / std::log2(double(n))).epsilon(1e-9));
  }
}

TEST_CASE("si is symmetric under agent permutations") {
  auto a = dist_of({0.7, 0.2, 0.1});
  auto b = dist_of({0.1, 0.8, 0.1});
  auto c = dist_of({0.3, 0.3, 0.4});
  double reference = si({a, b, c});
  CHECK(si({c, a, b}) == doctest::Approx(reference).epsilon(1e-12));
  CHECK(si({b, c, a}) == doctest::Approx(reference).epsilon(1e-12));
}

TEST_CASE("shared atoms keep si strictly below 1") {
  auto a = dist_of({0.9, 0.1, 0.0});
  auto b = dist_of({0.0, 0.1, 0.9});
  double s = si({a, b});
  CHECK(s < 1.0);
  CHECK(s > 0.0);
}

TEST_CASE("disjoint support stays finite, unlike plain KL") {
  auto a = dist_of({1.0, 0.0});
  auto b = dist_of({0.0, 1.0});
  CHECK(std::isfinite(jsd({a, b})));
}
