#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "marll/graph.hpp"

namespace marll {

/// Names accepted by builtin_graph(): "karate", "g1" (karate), "g2", "g3".
std::vector<std::string> builtin_graph_names();
Graph builtin_graph(std::string_view name);

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph grid_graph(std::size_t rows, std::size_t cols);
Graph complete_graph(std::size_t n);
/// Hub 0 with `leaves` leaves.
Graph star_graph(std::size_t leaves);
/// Erdős–Rényi G(n, p) drawn from `seed`.
Graph gnp_graph(std::size_t n, double p, std::uint64_t seed);

/// Resolves a graph reference:
///   builtin:NAME                          bundled graph
///   gen:path:N, gen:cycle:N, gen:grid:RxC, gen:complete:N, gen:star:N,
///   gen:gnp:N:P:SEED                      generated graph
///   anything else                         file path; *.json is read as a
///                                         JSON graph, other files as edge lists
/// Throws GraphError for unknown names and std::runtime_error for unreadable
/// files.
GraphDocument load_graph(std::string_view ref);

/// Short display name for a reference ("karate", "path-10", file stem).
std::string graph_display_name(std::string_view ref);

}  // namespace marll
