#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marll/graph.hpp"
#include "marll/layout.hpp"

namespace marll {

/// Unordered edge pairs whose segments cross in their interior. Pairs that
/// share an endpoint never count; collinear overlaps do.
std::uint64_t count_crossings(const Layout& l, const Graph& g);

/// m(m-1)/2 - ½Σdeg(deg-1), clamped at 0.
std::uint64_t crossing_upper_bound(const Graph& g);

/// Pairs of nodes closer than 2·radius.
std::uint64_t count_overlaps(const Layout& l, double radius);

/// Mean ((|e| - L) / L)^2 over all edges; 0 without edges.
double edge_length_error(const Layout& l, const Graph& g, double L);

/// Smallest angle between edges incident to v, in degrees; nullopt when
/// deg(v) ≤ 1.
std::optional<double> min_incident_angle(NodeId v, const Layout& l, const Graph& g);

double nc(const Layout& l, const Graph& g);
double no(const Layout& l, const Graph& g, double radius = 10.0);
double ne(const Layout& l, const Graph& g, double L);
double na(const Layout& l, const Graph& g);

/// Mean edge length; 0 without edges.
double mean_edge_length(const Layout& l, const Graph& g);

struct MetricsParams {
  double node_radius = 10.0;
  // Reference length for NE; the layout's mean edge length when unset.
  std::optional<double> edge_length;
};

struct MetricsReport {
  double nc = 1.0, no = 1.0, ne = 1.0, na = 1.0;
  std::uint64_t crossings = 0;
  std::uint64_t crossing_bound = 0;
  std::uint64_t overlaps = 0;
  double sigma = 0.0;
  double reference_length = 0.0;
  std::vector<std::optional<double>> min_angles;  // degrees, per node
  double runtime_ms = 0.0;
  std::size_t iterations = 0;
  std::string graph;
  std::string algorithm;
  std::uint64_t seed = 0;

  static std::string csv_header();
  /// graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms
  std::string csv_row() const;
};

MetricsReport report(const Layout& l, const Graph& g, const MetricsParams& params = {});

}  // namespace marll
