#include "marll/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace marll {

std::uint64_t count_crossings(const Layout& l, const Graph& g) {
  const auto edges = g.edges();
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge a = edges[i];
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const Edge b = edges[j];
      if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v) continue;
      if (segments_cross(l[a.u], l[a.v], l[b.u], l[b.v])) ++count;
    }
  }
  return count;
}

std::uint64_t crossing_upper_bound(const Graph& g) {
  const std::uint64_t m = g.edge_count();
  std::uint64_t adjacent = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const std::uint64_t d = g.degree(v);
    adjacent += d * (d - (d ? 1 : 0)) / 2;
  }
  const std::uint64_t pairs = m * (m ? m - 1 : 0) / 2;
  return pairs > adjacent ? pairs - adjacent : 0;
}

std::uint64_t count_overlaps(const Layout& l, double radius) {
  std::uint64_t count = 0;
  const double limit = 2.0 * radius;
  for (std::size_t u = 0; u < l.size(); ++u)
    for (std::size_t v = u + 1; v < l.size(); ++v)
      if (distance(l[u], l[v]) < limit) ++count;
  return count;
}

double edge_length_error(const Layout& l, const Graph& g, double L) {
  if (g.edge_count() == 0) return 0.0;
  double sum = 0.0;
  for (const Edge& e : g.edges()) {
    const double rel = (distance(l[e.u], l[e.v]) - L) / L;
    sum += rel * rel;
  }
  return sum / static_cast<double>(g.edge_count());
}

std::optional<double> min_incident_angle(NodeId v, const Layout& l, const Graph& g) {
  const auto nbrs = g.neighbors(v);
  if (nbrs.size() < 2) return std::nullopt;
  std::vector<double> angles;
  angles.reserve(nbrs.size());
  for (NodeId u : nbrs) angles.push_back(std::atan2(l[u].y - l[v].y, l[u].x - l[v].x));
  std::sort(angles.begin(), angles.end());
  double smallest = 2.0 * std::numbers::pi - (angles.back() - angles.front());
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) smallest = std::min(smallest, angles[i + 1] - angles[i]);
  return smallest * 180.0 / std::numbers::pi;
}

double nc(const Layout& l, const Graph& g) {
  const auto bound = crossing_upper_bound(g);
  if (bound == 0) return 1.0;
  const double ratio = static_cast<double>(count_crossings(l, g)) / static_cast<double>(bound);
  return std::max(0.0, 1.0 - ratio);
}

double no(const Layout& l, const Graph& g, double radius) {
  const std::size_t n = g.node_count();
  if (n <= 1) return 1.0;
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return 1.0 - static_cast<double>(count_overlaps(l, radius)) / pairs;
}

double ne(const Layout& l, const Graph& g, double L) {
  if (g.edge_count() == 0) return 1.0;
  return 1.0 / (1.0 + edge_length_error(l, g, L));
}

double na(const Layout& l, const Graph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) return 1.0;
  double deviation = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const auto theta = min_incident_angle(v, l, g);
    if (!theta) continue;
    const double ideal = 360.0 / static_cast<double>(g.degree(v));
    deviation += std::abs((ideal - *theta) / ideal);
  }
  return std::clamp(1.0 - deviation / static_cast<double>(n), 0.0, 1.0);
}

double mean_edge_length(const Layout& l, const Graph& g) {
  if (g.edge_count() == 0) return 0.0;
  double sum = 0.0;
  for (const Edge& e : g.edges()) sum += distance(l[e.u], l[e.v]);
  return sum / static_cast<double>(g.edge_count());
}

std::string MetricsReport::csv_header() { return "graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms"; }

std::string MetricsReport::csv_row() const {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << graph << ',' << algorithm << ',' << seed << ',' << nc << ',' << no << ',' << ne << ',' << na
      << ',' << iterations << ',' << runtime_ms;
  return out.str();
}

MetricsReport report(const Layout& l, const Graph& g, const MetricsParams& params) {
  MetricsReport r;
  r.crossings = count_crossings(l, g);
  r.crossing_bound = crossing_upper_bound(g);
  r.overlaps = count_overlaps(l, params.node_radius);
  r.reference_length = params.edge_length.value_or(mean_edge_length(l, g));
  r.nc = r.crossing_bound == 0
             ? 1.0
             : std::max(0.0, 1.0 - static_cast<double>(r.crossings) / static_cast<double>(r.crossing_bound));
  r.no = no(l, g, params.node_radius);
  if (g.edge_count() == 0 || r.reference_length <= 0.0) {
    // No edges, or every edge has zero length: the lengths are uniform.
    r.sigma = 0.0;
    r.ne = 1.0;
  } else {
    r.sigma = edge_length_error(l, g, r.reference_length);
    r.ne = 1.0 / (1.0 + r.sigma);
  }
  r.na = na(l, g);
  r.min_angles.reserve(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) r.min_angles.push_back(min_incident_angle(v, l, g));
  return r;
}

}  // namespace marll
