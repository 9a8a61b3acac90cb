#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parlens/layout.hpp"

namespace parlens {

enum class NodeKind : unsigned char { Walkable, TaskObject };

struct GraphNode {
  Coord pos;
  NodeKind kind = NodeKind::Walkable;
  CellKind cell = CellKind::Floor;
  int capacity = 1;  // c(v); meaningful for task objects only
};

/// Directed traversal graph over floor cells and workstations. Walkable
/// pairs get edges both ways; a workstation only receives edges (agents
/// interact with it, never move through it). Counters are absent.
/// Nodes are indexed in row-major coordinate order, adjacency lists and the
/// edge list are sorted, so every algorithm downstream is deterministic.
class LayoutGraph {
 public:
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const GraphNode& node(int id) const { return nodes_[id]; }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<int>& out_edges(int id) const { return out_[id]; }
  const std::vector<int>& in_edges(int id) const { return in_[id]; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool has_node(Coord c) const;
  int node_id(Coord c) const;  // throws ValidationError if absent
  int edge_index(int from, int to) const;  // -1 if no such edge

  bool is_walkable(int id) const { return nodes_[id].kind == NodeKind::Walkable; }

  /// Walkable nodes 4-adjacent to the given node (a workstation's service
  /// cells when the node is a task object).
  std::vector<int> adjacent_walkable(int id) const;

  std::vector<int> nodes_of_cell(CellKind kind) const;

  friend LayoutGraph build_graph(const LayoutSpec& spec);

 private:
  std::vector<GraphNode> nodes_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> edge_id_;  // parallel to out_: edge index
  std::map<Coord, int> index_;
};

LayoutGraph build_graph(const LayoutSpec& spec);

struct PathResult {
  int length = 0;
  std::vector<int> nodes;  // from .. to inclusive
};

/// Minimum-edge-count path; among tied paths the one whose nodes are
/// lexicographically smallest in row-major order. Throws Unreachable.
PathResult shortest_path(const LayoutGraph& graph, int from, int to);

/// B(e) for every edge, indexed like graph.edges(): unnormalized edge
/// betweenness over all ordered reachable pairs s != t, with fractional
/// credit across tied shortest paths (Brandes accumulation).
using EdgeCentralityMap = std::vector<double>;

EdgeCentralityMap edge_betweenness(const LayoutGraph& graph);

/// Maximum number of internally vertex-disjoint walkable paths from `from`
/// to `to`: unit-capacity max-flow on the vertex-split graph, which by
/// Menger's theorem equals the minimum walkable vertex cut. Throws
/// Unreachable. `from == to` counts as one slot (the shared cell itself).
int disjoint_path_capacity(const LayoutGraph& graph, int from, int to);

nlohmann::json graph_to_json(const LayoutGraph& graph,
                             const EdgeCentralityMap* betweenness = nullptr);

}  // namespace parlens
