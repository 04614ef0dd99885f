#include "marll/graph.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include <json.hpp>

namespace marll {

using nlohmann::json;

Graph Graph::from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges,
                        std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != node_count) {
    throw GraphError("label count does not match node count");
  }
  Graph g;
  g.adjacency_.resize(node_count);
  g.labels_ = std::move(labels);
  g.labels_.resize(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    if (g.labels_[i].empty()) g.labels_[i] = std::to_string(i);
    if (!g.index_.emplace(g.labels_[i], static_cast<NodeId>(i)).second) {
      throw GraphError("duplicate node label '" + g.labels_[i] + "'");
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) throw GraphError("edge endpoint out of range");
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.emplace(a, b).second) continue;
    g.edges_.push_back({a, b});
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a >= node_count() || b >= node_count()) return false;
  const auto& nbrs = adjacency_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::optional<NodeId> Graph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

class Interner {
 public:
  NodeId intern(const std::string& label) {
    auto [it, inserted] = ids_.emplace(label, static_cast<NodeId>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  std::vector<std::string> take_labels() { return std::move(labels_); }
  std::size_t size() const { return labels_.size(); }

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> labels_;
};

std::string id_to_label(const json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  if (id.is_number_unsigned()) return std::to_string(id.get<unsigned long long>());
  if (id.is_number()) {
    std::ostringstream os;
    os << id.get<double>();
    return os.str();
  }
  throw GraphError("node id must be a string or number");
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  Interner interner;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line.remove_prefix(first);
    if (line.front() == '%' || line.front() == '#') continue;

    std::istringstream tokens{std::string(line)};
    std::string a, b, extra;
    if (!(tokens >> a >> b)) throw ParseError("expected two node ids", line_no);
    if (tokens >> extra) throw ParseError("expected exactly two node ids, got more", line_no);
    pairs.emplace_back(interner.intern(a), interner.intern(b));
  }
  if (pairs.empty()) throw ParseError("edge list is empty", 0);
  const std::size_t n = interner.size();
  return Graph::from_edges(n, pairs, interner.take_labels());
}

GraphDocument parse_json_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GraphError(std::string("invalid JSON graph: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw GraphError("JSON graph needs a \"nodes\" array");
  }

  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::optional<Vec2>> positions;
  bool any_position = false;
  for (const auto& node : doc["nodes"]) {
    if (!node.is_object() || !node.contains("id")) throw GraphError("node without id");
    std::string label = id_to_label(node["id"]);
    if (!ids.emplace(label, static_cast<NodeId>(labels.size())).second) {
      throw GraphError("duplicate node id '" + label + "'");
    }
    labels.push_back(std::move(label));
    if (node.contains("x") && node.contains("y") && node["x"].is_number() && node["y"].is_number()) {
      positions.push_back(Vec2{node["x"].get<double>(), node["y"].get<double>()});
      any_position = true;
    } else {
      positions.emplace_back();
    }
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw GraphError("\"edges\" must be an array");
    for (const auto& edge : doc["edges"]) {
      if (!edge.is_object() || !edge.contains("source") || !edge.contains("target")) {
        throw GraphError("edge needs source and target");
      }
      auto resolve = [&](const json& id) {
        const std::string label = id_to_label(id);
        auto it = ids.find(label);
        if (it == ids.end()) throw GraphError("edge references unknown node '" + label + "'");
        return it->second;
      };
      pairs.emplace_back(resolve(edge["source"]), resolve(edge["target"]));
    }
  }

  GraphDocument out;
  const std::size_t n = labels.size();
  out.graph = Graph::from_edges(n, pairs, std::move(labels));
  if (any_position) out.positions = std::move(positions);
  return out;
}

std::string to_json_graph(const Graph& g, std::span<const Vec2> positions) {
  json nodes = json::array();
  for (NodeId v = 0; v < g.node_count(); ++v) {
    json node{{"id", g.label(v)}};
    if (v < positions.size()) {
      node["x"] = positions[v].x;
      node["y"] = positions[v].y;
    }
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({{"source", g.label(e.u)}, {"target", g.label(e.v)}});
  return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}.dump();
}

std::uint32_t DistanceMatrix::diameter() const {
  std::uint32_t best = 0;
  for (auto h : hops_) {
    if (h != kUnreachable) best = std::max(best, h);
  }
  return best;
}

DistanceMatrix all_pairs_hop_distance(const Graph& g) {
  const std::size_t n = g.node_count();
  DistanceMatrix d(n);
  std::vector<NodeId> queue;
  queue.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    queue.clear();
    queue.push_back(s);
    d.at(s, s) = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      const std::uint32_t next = d(s, u) + 1;
      for (NodeId w : g.neighbors(u)) {
        if (d(s, w) == DistanceMatrix::kUnreachable) {
          d.at(s, w) = next;
          queue.push_back(w);
        }
      }
    }
  }
  return d;
}

std::vector<NodeId> hop_neighborhood(const DistanceMatrix& d, NodeId v, std::uint32_t hops) {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < d.size(); ++u) {
    const auto h = d(v, u);
    if (u != v && h != DistanceMatrix::kUnreachable && h <= hops) out.push_back(u);
  }
  return out;
}

}  // namespace marll
