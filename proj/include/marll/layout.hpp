#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "marll/geometry.hpp"
#include "marll/graph.hpp"
#include "marll/random.hpp"

namespace marll {

/// Drawing canvas used for random initialization, in pixels.
struct LayoutFrame {
  double width = 1000.0;
  double height = 1000.0;
};

/// One position per graph node, in pixels.
struct Layout {
  std::vector<Vec2> positions;

  Layout() = default;
  explicit Layout(std::vector<Vec2> p) : positions(std::move(p)) {}

  std::size_t size() const { return positions.size(); }
  Vec2& operator[](std::size_t i) { return positions[i]; }
  const Vec2& operator[](std::size_t i) const { return positions[i]; }
  bool all_finite() const;

  friend bool operator==(const Layout&, const Layout&) = default;
};

Layout random_layout(std::size_t n, const LayoutFrame& frame, Rng& rng);

/// Coincident-node jitter applied before force evaluation.
inline constexpr double kCoincidenceJitter = 1e-3;

/// Nudges v by kCoincidenceJitter in a random direction until no other node
/// shares its exact position. Returns true when v moved.
bool separate_from_others(Layout& layout, std::size_t v, Rng& rng);

/// Same, for every node; O(n log n).
bool separate_coincident(Layout& layout, Rng& rng);

/// {label: {"x": .., "y": ..}} keyed by the graph's labels.
nlohmann::json layout_to_json(const Layout& layout, const Graph& g);
Layout layout_from_json(const nlohmann::json& doc, const Graph& g);

/// Moves every position by `offset`.
Layout translated(const Layout& layout, Vec2 offset);
/// Rotates about the origin by `radians` and scales by `factor`.
Layout rotated_scaled(const Layout& layout, double radians, double factor);

}  // namespace marll
