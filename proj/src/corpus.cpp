#include "marll/corpus.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "marll/random.hpp"

namespace marll {
namespace {

// Zachary's karate club, 1-indexed.
constexpr std::string_view kKarate =
    "1 2 1 3 1 4 1 5 1 6 1 7 1 8 1 9 1 11 1 12 1 13 1 14 1 18 1 20 1 22 1 32 2 3 2 4 2 8 2 14 "
    "2 18 2 20 2 22 2 31 3 4 3 8 3 9 3 10 3 14 3 28 3 29 3 33 4 8 4 13 4 14 5 7 5 11 6 7 6 11 "
    "6 17 7 17 9 31 9 33 9 34 10 34 14 34 15 33 15 34 16 33 16 34 19 33 19 34 20 34 21 33 21 34 "
    "23 33 23 34 24 26 24 28 24 30 24 33 24 34 25 26 25 28 25 32 26 32 27 30 27 34 28 34 29 32 "
    "29 34 30 33 30 34 31 33 31 34 32 33 32 34 33 34";

// Sparse near-planar stand-ins (Euclidean spanning tree plus short chords)
// sized like a small power grid and a small synthetic benchmark graph.
constexpr std::string_view kG2 =
    "0 9 0 30 0 33 1 31 1 38 2 13 2 18 2 28 3 24 3 30 4 7 5 9 5 23 5 31 6 7 6 13 6 18 7 10 "
    "7 34 8 11 8 20 9 29 11 26 12 15 12 27 13 34 14 24 14 30 15 32 16 28 17 22 17 25 18 34 "
    "18 37 19 21 19 25 20 21 21 36 22 23 22 37 23 29 25 36 25 37 27 35 28 34 28 35";

constexpr std::string_view kG3 =
    "0 38 0 40 1 12 1 20 1 24 1 31 2 37 2 43 3 25 3 29 4 19 4 33 5 6 6 8 6 22 7 16 8 17 8 18 "
    "9 26 9 28 9 29 10 39 11 40 12 34 13 22 13 41 14 30 15 25 16 21 16 35 17 30 17 43 18 22 "
    "18 30 19 26 19 27 19 29 20 34 20 36 21 36 23 33 24 27 27 32 30 39 32 33 34 42 35 41 37 40";

Graph from_flat_pairs(std::string_view flat, std::size_t n, NodeId base) {
  std::istringstream in{std::string(flat)};
  std::vector<std::pair<NodeId, NodeId>> edges;
  NodeId a = 0, b = 0;
  while (in >> a >> b) edges.emplace_back(a - base, b - base);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + base));
  return Graph::from_edges(n, edges, std::move(labels));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T parse_number(std::string_view text, std::string_view ref) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw GraphError("bad number '" + std::string(text) + "' in " + std::string(ref));
  }
  return value;
}

Graph generated(std::string_view spec, std::string_view ref) {
  const auto parts = split(spec, ':');
  const auto kind = parts[0];
  auto count = [&](std::size_t i) {
    if (parts.size() <= i) throw GraphError("missing size in " + std::string(ref));
    return parse_number<std::size_t>(parts[i], ref);
  };
  if (kind == "path") return path_graph(count(1));
  if (kind == "cycle") return cycle_graph(count(1));
  if (kind == "complete") return complete_graph(count(1));
  if (kind == "star") return star_graph(count(1));
  if (kind == "grid") {
    if (parts.size() < 2) throw GraphError("missing size in " + std::string(ref));
    const auto dims = split(parts[1], 'x');
    if (dims.size() != 2) throw GraphError("grid size must be RxC in " + std::string(ref));
    return grid_graph(parse_number<std::size_t>(dims[0], ref), parse_number<std::size_t>(dims[1], ref));
  }
  if (kind == "gnp") {
    if (parts.size() != 4) throw GraphError("expected gen:gnp:N:P:SEED, got " + std::string(ref));
    return gnp_graph(count(1), parse_number<double>(parts[2], ref),
                     parse_number<std::uint64_t>(parts[3], ref));
  }
  throw GraphError("unknown generator in " + std::string(ref));
}

Graph indexed_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  if (n == 0) throw GraphError("generated graph needs at least one node");
  return Graph::from_edges(n, edges);
}

}  // namespace

std::vector<std::string> builtin_graph_names() { return {"karate", "g1", "g2", "g3"}; }

Graph builtin_graph(std::string_view name) {
  if (name == "karate" || name == "g1") return from_flat_pairs(kKarate, 34, 1);
  if (name == "g2") return from_flat_pairs(kG2, 39, 0);
  if (name == "g3") return from_flat_pairs(kG3, 44, 0);
  throw GraphError("unknown builtin graph '" + std::string(name) + "'");
}

Graph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(i - 1, i);
  return indexed_graph(n, edges);
}

Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(i - 1, i);
  if (n >= 3) edges.emplace_back(n - 1, 0);
  return indexed_graph(n, edges);
}

Graph grid_graph(std::size_t rows, std::size_t cols) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return indexed_graph(rows * cols, edges);
}

Graph complete_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return indexed_graph(n, edges);
}

Graph star_graph(std::size_t leaves) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return indexed_graph(leaves + 1, edges);
}

Graph gnp_graph(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw GraphError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.emplace_back(u, v);
  return indexed_graph(n, edges);
}

GraphDocument load_graph(std::string_view ref) {
  if (ref.starts_with("builtin:")) return {builtin_graph(ref.substr(8)), {}};
  if (ref.starts_with("gen:")) return {generated(ref.substr(4), ref), {}};

  const std::filesystem::path path{std::string(ref)};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read graph file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (path.extension() == ".json") return parse_json_graph(text.str());
  return {parse_edge_list(text.str()), {}};
}

std::string graph_display_name(std::string_view ref) {
  if (ref.starts_with("builtin:")) {
    const auto name = ref.substr(8);
    return name == "g1" ? "karate" : std::string(name);
  }
  if (ref.starts_with("gen:")) {
    std::string name(ref.substr(4));
    for (char& c : name)
      if (c == ':') c = '-';
    return name;
  }
  return std::filesystem::path(std::string(ref)).stem().string();
}

}  // namespace marll
