// Test-only reference implementations, kept independent of the library's
// algorithm choices so they can act as oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace oracles {

// Adjacency-list digraph for brute-force work on tiny graphs.
using Digraph = std::vector<std::vector<int>>;

inline std::vector<int> bfs_dist(const Digraph& g, int s) {
  std::vector<int> dist(g.size(), -1);
  std::deque<int> q{s};
  dist[s] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : g[u])
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
  }
  return dist;
}

/// Every shortest path between every ordered pair, by exhaustive DFS over
/// the shortest-path DAG. Returns edge -> sum over pairs of the fraction of
/// that pair's shortest paths using the edge.
inline std::map<std::pair<int, int>, double> edge_betweenness_bruteforce(
    const Digraph& g) {
  const int n = static_cast<int>(g.size());
  std::map<std::pair<int, int>, double> result;
  for (int u = 0; u < n; ++u)
    for (int v : g[u]) result[{u, v}] = 0.0;

  for (int s = 0; s < n; ++s) {
    auto dist = bfs_dist(g, s);
    for (int t = 0; t < n; ++t) {
      if (t == s || dist[t] == -1) continue;
      std::vector<std::vector<int>> paths;
      std::vector<int> current{s};
      std::function<void(int)> extend = [&](int u) {
        if (u == t) {
          paths.push_back(current);
          return;
        }
        for (int v : g[u]) {
          if (dist[v] == dist[u] + 1 && dist[v] <= dist[t]) {
            current.push_back(v);
            extend(v);
            current.pop_back();
          }
        }
      };
      extend(s);
      const double share = 1.0 / static_cast<double>(paths.size());
      for (const auto& path : paths)
        for (size_t k = 0; k + 1 < path.size(); ++k)
          result[{path[k], path[k + 1]}] += share;
    }
  }
  return result;
}

namespace detail {

inline bool reaches(const Digraph& g, int s, int t,
                    const std::vector<bool>& gone) {
  std::deque<int> q{s};
  std::vector<bool> seen(g.size(), false);
  seen[s] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == t) return true;
    for (int v : g[u])
      if (!seen[v] && !gone[v]) {
        seen[v] = true;
        q.push_back(v);
      }
  }
  return false;
}

}  // namespace detail

/// Maximum internally vertex-disjoint s-t paths by Menger duality: direct
/// s->t edges each carry one path; the rest equal the smallest internal
/// vertex set whose removal disconnects the remaining graph, found by
/// enumerating removal sets in increasing size.
inline int disjoint_paths_bruteforce(Digraph g, int s, int t) {
  int direct = 0;
  auto& from_s = g[s];
  direct = static_cast<int>(std::count(from_s.begin(), from_s.end(), t));
  from_s.erase(std::remove(from_s.begin(), from_s.end(), t), from_s.end());

  const int n = static_cast<int>(g.size());
  std::vector<int> candidates;
  for (int v = 0; v < n; ++v)
    if (v != s && v != t) candidates.push_back(v);
  const int k = static_cast<int>(candidates.size());

  for (int size = 0; size <= k; ++size) {
    std::vector<int> pick;
    std::function<bool(int)> choose = [&](int start) {
      if (static_cast<int>(pick.size()) == size) {
        std::vector<bool> gone(n, false);
        for (int v : pick) gone[v] = true;
        return !detail::reaches(g, s, t, gone);
      }
      for (int i = start; i < k; ++i) {
        pick.push_back(candidates[i]);
        if (choose(i + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    if (choose(0)) return direct + size;
  }
  return direct + k;
}

/// Jensen-Shannon divergence via the entropy identity
/// JSD = H(M) - mean_i H(P_i), an algebraic route independent of the
/// KL-sum form the library uses. Base-2 logs.
inline double jsd_entropy_oracle(const std::vector<std::vector<double>>& dists) {
  auto entropy = [](const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
      if (v > 0.0) h -= v * std::log2(v);
    return h;
  };
  const size_t width = dists[0].size();
  std::vector<double> mixture(width, 0.0);
  double mean_entropy = 0.0;
  for (const auto& p : dists) {
    for (size_t a = 0; a < width; ++a) mixture[a] += p[a] / dists.size();
    mean_entropy += entropy(p) / dists.size();
  }
  return entropy(mixture) - mean_entropy;
}

/// Flow-shop completion recurrence for a chain pipeline with one dedicated
/// agent per stage: C(j, i) = max(C(j-1, i), C(j, i-1)) + d_i.
inline long flow_shop_makespan(const std::vector<int>& durations, int jobs) {
  const int m = static_cast<int>(durations.size());
  std::vector<long> prev(m, 0);
  for (int j = 0; j < jobs; ++j) {
    std::vector<long> cur(m, 0);
    for (int i = 0; i < m; ++i) {
      long ready = std::max(prev[i], i > 0 ? cur[i - 1] : 0L);
      cur[i] = ready + durations[i];
    }
    prev = cur;
  }
  return prev[m - 1];
}

}  // namespace oracles
