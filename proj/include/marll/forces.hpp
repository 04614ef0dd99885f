#pragma once

#include <stdexcept>

#include "marll/geometry.hpp"
#include "marll/graph.hpp"
#include "marll/layout.hpp"

namespace marll {

class CoincidentNodesError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Force laws return magnitudes. attraction() is signed: positive pulls the
// pair together, negative pushes it apart. repulsion() always pushes apart.

struct FrForceLaw {
  double k = 30.0;
  double attraction(double d) const { return d * d / k; }
  double repulsion(double d) const { return k * k / d; }
};

struct DgcForceLaw {
  double ideal_length = 30.0;  // λ
  double elastic = 5.0;        // ζ
  double repulsion_constant = 5000.0;  // μ

  double attraction(double d) const {
    const double gap = ideal_length - d;
    const double magnitude = gap * gap / elastic;
    return d > ideal_length ? magnitude : -magnitude;
  }
  double repulsion(double d) const { return repulsion_constant / (d * d); }
};

/// Vector sum of the attractive forces from v's neighbours and the
/// repulsive forces from every other node. Throws CoincidentNodesError when
/// another node sits exactly on v.
template <class Law>
Vec2 net_force(NodeId v, const Layout& layout, const Graph& g, const Law& law) {
  Vec2 total{};
  const Vec2 pv = layout[v];
  for (NodeId u = 0; u < layout.size(); ++u) {
    if (u == v) continue;
    const Vec2 away = pv - layout[u];
    const double d = norm(away);
    if (d == 0.0) throw CoincidentNodesError("node shares its position with another node");
    total += away * (law.repulsion(d) / d);
  }
  for (NodeId u : g.neighbors(v)) {
    const Vec2 toward = layout[u] - pv;
    const double d = norm(toward);
    total += toward * (law.attraction(d) / d);
  }
  return total;
}

}  // namespace marll
