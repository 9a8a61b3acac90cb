#include "parlens/layout_graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>

#include <nlohmann/json.hpp>

namespace parlens {

namespace {
constexpr std::array<std::pair<int, int>, 4> kNeighbors4 = {
    {{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
constexpr int kUnvisited = -1;
}  // namespace

bool LayoutGraph::has_node(Coord c) const { return index_.count(c) > 0; }

int LayoutGraph::node_id(Coord c) const {
  auto it = index_.find(c);
  if (it == index_.end())
    throw ValidationError("no graph node at " + coord_str(c));
  return it->second;
}

int LayoutGraph::edge_index(int from, int to) const {
  const auto& outs = out_[from];
  for (size_t k = 0; k < outs.size(); ++k)
    if (outs[k] == to) return edge_id_[from][k];
  return -1;
}

std::vector<int> LayoutGraph::adjacent_walkable(int id) const {
  std::vector<int> result;
  for (int v : in_[id])
    if (is_walkable(v)) result.push_back(v);
  // in-neighbors cover workstations; for walkable nodes in == out
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

std::vector<int> LayoutGraph::nodes_of_cell(CellKind kind) const {
  std::vector<int> result;
  for (int i = 0; i < node_count(); ++i)
    if (nodes_[i].cell == kind) result.push_back(i);
  return result;
}

LayoutGraph build_graph(const LayoutSpec& spec) {
  LayoutGraph g;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      Coord c{x, y};
      CellKind kind = spec.at(c);
      if (kind == CellKind::Counter) continue;
      GraphNode node;
      node.pos = c;
      node.cell = kind;
      if (kind == CellKind::Floor) {
        node.kind = NodeKind::Walkable;
      } else {
        node.kind = NodeKind::TaskObject;
        node.capacity = spec.capacity_at(c);
      }
      g.index_[c] = static_cast<int>(g.nodes_.size());
      g.nodes_.push_back(node);
    }
  }

  const int n = g.node_count();
  g.out_.resize(n);
  g.in_.resize(n);
  g.edge_id_.resize(n);
  for (int u = 0; u < n; ++u) {
    if (g.nodes_[u].kind == NodeKind::TaskObject) continue;  // sinks emit nothing
    for (auto [dx, dy] : kNeighbors4) {
      Coord nc{g.nodes_[u].pos.x + dx, g.nodes_[u].pos.y + dy};
      auto it = g.index_.find(nc);
      if (it == g.index_.end()) continue;
      g.out_[u].push_back(it->second);
    }
    std::sort(g.out_[u].begin(), g.out_[u].end());
  }
  for (int u = 0; u < n; ++u) {
    for (int v : g.out_[u]) {
      g.edge_id_[u].push_back(static_cast<int>(g.edges_.size()));
      g.edges_.emplace_back(u, v);
      g.in_[v].push_back(u);
    }
  }
  for (auto& ins : g.in_) std::sort(ins.begin(), ins.end());
  return g;
}

namespace {

std::vector<int> bfs_distances(const LayoutGraph& g, int source, bool reverse) {
  std::vector<int> dist(g.node_count(), kUnvisited);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    const auto& next = reverse ? g.in_edges(u) : g.out_edges(u);
    for (int v : next) {
      if (dist[v] == kUnvisited) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

PathResult shortest_path(const LayoutGraph& graph, int from, int to) {
  if (from == to) return {0, {from}};
  std::vector<int> dist_from = bfs_distances(graph, from, false);
  if (dist_from[to] == kUnvisited) {
    throw Unreachable("no path from " + coord_str(graph.node(from).pos) +
                      " to " + coord_str(graph.node(to).pos));
  }
  std::vector<int> dist_to = bfs_distances(graph, to, true);
  const int total = dist_from[to];

  // Walk forward always taking the smallest-index neighbor that stays on a
  // shortest path; node ids are row-major, so this is the lexicographically
  // smallest tied path.
  PathResult result;
  result.length = total;
  result.nodes.push_back(from);
  int u = from;
  while (u != to) {
    int best = -1;
    for (int v : graph.out_edges(u)) {
      if (dist_from[v] == dist_from[u] + 1 && dist_to[v] != kUnvisited &&
          dist_from[v] + dist_to[v] == total) {
        best = v;
        break;  // out_edges sorted ascending
      }
    }
    result.nodes.push_back(best);
    u = best;
  }
  return result;
}

EdgeCentralityMap edge_betweenness(const LayoutGraph& graph) {
  const int n = graph.node_count();
  EdgeCentralityMap centrality(graph.edge_count(), 0.0);

  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n);
  std::vector<std::vector<std::pair<int, int>>> preds(n);  // (pred, edge id)
  std::vector<int> order;
  order.reserve(n);

  for (int s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), kUnvisited);
    for (auto& p : preds) p.clear();
    order.clear();

    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (int v : graph.out_edges(u)) {
        if (dist[v] == kUnvisited) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          preds[v].emplace_back(u, graph.edge_index(u, v));
        }
      }
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int w = *it;
      for (auto [v, eid] : preds[w]) {
        double credit = sigma[v] / sigma[w] * (1.0 + delta[w]);
        centrality[eid] += credit;
        delta[v] += credit;
      }
    }
  }
  return centrality;
}

int disjoint_path_capacity(const LayoutGraph& graph, int from, int to) {
  if (from == to) return 1;

  // Vertex-split flow network: node v becomes v_in (2v) -> v_out (2v+1)
  // with capacity 1 except at the endpoints.
  struct Arc {
    int to;
    int cap;
    int rev;
  };
  const int n = graph.node_count();
  std::vector<std::vector<Arc>> net(2 * n);
  auto add_arc = [&](int u, int v, int cap) {
    net[u].push_back({v, cap, static_cast<int>(net[v].size())});
    net[v].push_back({u, 0, static_cast<int>(net[u].size()) - 1});
  };
  const int big = n + 1;
  for (int v = 0; v < n; ++v)
    add_arc(2 * v, 2 * v + 1, (v == from || v == to) ? big : 1);
  for (auto [u, v] : graph.edges()) add_arc(2 * u + 1, 2 * v, big);

  const int source = 2 * from + 1;
  const int sink = 2 * to;
  int flow = 0;
  while (true) {
    // BFS for an augmenting path (unit capacities: one augmentation = +1)
    std::vector<std::pair<int, int>> parent(2 * n, {-1, -1});  // (node, arc idx)
    std::deque<int> queue{source};
    parent[source] = {source, -1};
    while (!queue.empty() && parent[sink].first == -1) {
      int u = queue.front();
      queue.pop_front();
      for (size_t k = 0; k < net[u].size(); ++k) {
        const Arc& a = net[u][k];
        if (a.cap > 0 && parent[a.to].first == -1) {
          parent[a.to] = {u, static_cast<int>(k)};
          queue.push_back(a.to);
        }
      }
    }
    if (parent[sink].first == -1) break;
    for (int v = sink; v != source;) {
      auto [u, k] = parent[v];
      net[u][k].cap -= 1;
      net[net[u][k].to][net[u][k].rev].cap += 1;
      v = u;
    }
    ++flow;
  }
  if (flow == 0) {
    throw Unreachable("no path from " + coord_str(graph.node(from).pos) +
                      " to " + coord_str(graph.node(to).pos));
  }
  return flow;
}

nlohmann::json graph_to_json(const LayoutGraph& graph,
                             const EdgeCentralityMap* betweenness) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : graph.nodes()) {
    nodes.push_back({{"x", node.pos.x},
                     {"y", node.pos.y},
                     {"kind", node.kind == NodeKind::Walkable
                                  ? "walkable"
                                  : station_name(node.cell)}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (auto [u, v] : graph.edges()) edges.push_back({u, v});

  nlohmann::json out{{"nodes", nodes}, {"edges", edges}};
  if (betweenness) {
    nlohmann::json b = nlohmann::json::object();
    for (size_t e = 0; e < betweenness->size(); ++e)
      b[std::to_string(e)] = (*betweenness)[e];
    out["betweenness"] = b;
  }
  return out;
}

}  // namespace parlens
