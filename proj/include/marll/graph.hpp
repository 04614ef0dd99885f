#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "marll/geometry.hpp"

namespace marll {

using NodeId = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
  NodeId u;
  NodeId v;
  friend constexpr bool operator==(Edge, Edge) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : GraphError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable undirected simple graph with dense node ids 0..n-1.
class Graph {
 public:
  Graph() = default;

  /// Self-loops are dropped and duplicate pairs collapsed. Empty labels are
  /// replaced by the decimal node index.
  static Graph from_edges(std::size_t node_count,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          std::vector<std::string> labels = {});

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }
  bool has_edge(NodeId a, NodeId b) const;

  const std::string& label(NodeId v) const { return labels_.at(v); }
  std::span<const std::string> labels() const { return labels_; }
  std::optional<NodeId> find(std::string_view label) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

/// A graph plus any node positions stored alongside it.
struct GraphDocument {
  Graph graph;
  std::vector<std::optional<Vec2>> positions;  // empty or one slot per node
};

/// Whitespace-separated "a b" pairs; blank lines and lines starting with
/// '%' or '#' are skipped. Throws ParseError on malformed lines or when no
/// edge is present.
Graph parse_edge_list(std::string_view text);

/// {"nodes":[{"id":..,"x"?:..,"y"?:..}], "edges":[{"source":..,"target":..}]}
GraphDocument parse_json_graph(std::string_view text);
std::string to_json_graph(const Graph& g, std::span<const Vec2> positions = {});

/// Hop counts between every pair; kUnreachable marks different components.
class DistanceMatrix {
 public:
  static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), hops_(n * n, kUnreachable) {}

  std::size_t size() const { return n_; }
  std::uint32_t operator()(NodeId u, NodeId v) const { return hops_[u * n_ + v]; }
  std::uint32_t& at(NodeId u, NodeId v) { return hops_[u * n_ + v]; }
  bool reachable(NodeId u, NodeId v) const { return (*this)(u, v) != kUnreachable; }
  /// Largest finite entry.
  std::uint32_t diameter() const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> hops_;
};

DistanceMatrix all_pairs_hop_distance(const Graph& g);

/// Nodes within `hops` of v (excluding v), in ascending id order.
std::vector<NodeId> hop_neighborhood(const DistanceMatrix& d, NodeId v, std::uint32_t hops);

}  // namespace marll
