#include "marll/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace marll {

bool Layout::all_finite() const {
  return std::all_of(positions.begin(), positions.end(),
                     [](Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); });
}

Layout random_layout(std::size_t n, const LayoutFrame& frame, Rng& rng) {
  Layout out;
  out.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, frame.width);
    const double y = rng.uniform(0.0, frame.height);
    out.positions.push_back({x, y});
  }
  return out;
}

bool separate_from_others(Layout& layout, std::size_t v, Rng& rng) {
  bool moved = false;
  for (;;) {
    bool clash = false;
    for (std::size_t u = 0; u < layout.size(); ++u) {
      if (u != v && layout[u] == layout[v]) {
        clash = true;
        break;
      }
    }
    if (!clash) return moved;
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    layout[v] += Vec2{std::cos(angle), std::sin(angle)} * kCoincidenceJitter;
    moved = true;
  }
}

bool separate_coincident(Layout& layout, Rng& rng) {
  bool moved = false;
  for (;;) {
    std::vector<std::size_t> order(layout.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Vec2 pa = layout[a], pb = layout[b];
      return pa.x != pb.x ? pa.x < pb.x : (pa.y != pb.y ? pa.y < pb.y : a < b);
    });
    bool clash = false;
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (layout[order[i]] == layout[order[i - 1]]) {
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        layout[order[i]] += Vec2{std::cos(angle), std::sin(angle)} * kCoincidenceJitter;
        clash = true;
      }
    }
    if (!clash) return moved;
    moved = true;
  }
}

nlohmann::json layout_to_json(const Layout& layout, const Graph& g) {
  nlohmann::json out = nlohmann::json::object();
  for (NodeId v = 0; v < layout.size(); ++v) {
    out[g.label(v)] = {{"x", layout[v].x}, {"y", layout[v].y}};
  }
  return out;
}

Layout layout_from_json(const nlohmann::json& doc, const Graph& g) {
  if (!doc.is_object()) throw GraphError("layout JSON must be an object");
  Layout out(std::vector<Vec2>(g.node_count()));
  std::vector<bool> filled(g.node_count(), false);
  for (const auto& [label, pos] : doc.items()) {
    auto id = g.find(label);
    if (!id) throw GraphError("layout references unknown node '" + label + "'");
    out[*id] = {pos.at("x").get<double>(), pos.at("y").get<double>()};
    filled[*id] = true;
  }
  if (std::find(filled.begin(), filled.end(), false) != filled.end()) {
    throw GraphError("layout does not cover every node");
  }
  return out;
}

Layout translated(const Layout& layout, Vec2 offset) {
  Layout out = layout;
  for (auto& p : out.positions) p += offset;
  return out;
}

Layout rotated_scaled(const Layout& layout, double radians, double factor) {
  const double c = std::cos(radians), s = std::sin(radians);
  Layout out = layout;
  for (auto& p : out.positions) p = Vec2{c * p.x - s * p.y, s * p.x + c * p.y} * factor;
  return out;
}

}  // namespace marll
