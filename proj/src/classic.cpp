#include "marll/classic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "marll/forces.hpp"
#include "marll/random.hpp"

namespace marll {

void FrParams::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  cooling.validate();
  convergence.validate();
}

void DgcParams::validate() const {
  if (!(ideal_length > 0.0 && elastic > 0.0 && repulsion_constant > 0.0)) {
    throw std::invalid_argument("DGC constants must be positive");
  }
  cooling.validate();
  convergence.validate();
}

void StressParams::validate() const {
  if (!(edge_length > 0.0)) throw std::invalid_argument("edge length must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("stress tolerance must be positive");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
}

namespace {

// Jacobi iteration: all forces from the current positions, then every node
// moves along its force by at most the temperature.
template <class Law>
ClassicResult run_force_directed(const Graph& g, const Law& law, const CoolingSchedule& cooling,
                                 const ConvergenceConfig& convergence, Layout layout, Rng& rng,
                                 const IterationObserver& observe) {
  const std::size_t n = g.node_count();
  if (layout.size() != n) throw std::invalid_argument("initial layout does not match graph");
  const std::size_t period = cooling.resolve_period(n, g.edge_count());
  ConvergenceMonitor monitor(convergence, convergence.criteria.value_or(kForceCriteria),
                             convergence.window ? convergence.window : period);

  std::vector<Vec2> disp(n);
  for (std::size_t t = 0;; ++t) {
    const double temperature = cooling.temperature(t, period);
    separate_coincident(layout, rng);

    std::fill(disp.begin(), disp.end(), Vec2{});
    for (NodeId v = 0; v < n; ++v) {
      for (NodeId u = v + 1; u < n; ++u) {
        const Vec2 delta = layout[v] - layout[u];
        const double d = norm(delta);
        const Vec2 push = delta * (law.repulsion(d) / d);
        disp[v] += push;
        disp[u] -= push;
      }
    }
    for (const Edge& e : g.edges()) {
      const Vec2 delta = layout[e.v] - layout[e.u];
      const double d = norm(delta);
      const Vec2 pull = delta * (law.attraction(d) / d);
      disp[e.u] += pull;
      disp[e.v] -= pull;
    }

    double total = 0.0, max_step = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      const double len = norm(disp[v]);
      if (len == 0.0) continue;
      const Vec2 step = len > temperature ? disp[v] * (temperature / len) : disp[v];
      layout[v] += step;
      const double moved = norm(step);
      total += moved;
      max_step = std::max(max_step, moved);
    }

    monitor.record(total / static_cast<double>(n));
    if (observe) observe(IterationInfo{t + 1, temperature, max_step, 0.0}, layout);
    if (auto reason = monitor.check()) return {std::move(layout), t + 1, *reason};
  }
}

}  // namespace

ClassicResult fr_layout(const Graph& g, const FrParams& p, std::uint64_t seed,
                        const IterationObserver& observe) {
  if (g.node_count() == 0) throw std::invalid_argument("graph has no nodes");
  Rng rng(seed);
  Layout init = random_layout(g.node_count(), p.frame, rng);
  p.validate();
  return run_force_directed(g, FrForceLaw{p.k}, p.cooling, p.convergence, std::move(init), rng, observe);
}

ClassicResult fr_layout_from(const Graph& g, const FrParams& p, Layout init, std::uint64_t seed,
                             const IterationObserver& observe) {
  p.validate();
  Rng rng(seed);
  return run_force_directed(g, FrForceLaw{p.k}, p.cooling, p.convergence, std::move(init), rng, observe);
}

ClassicResult dgc_layout(const Graph& g, const DgcParams& p, std::uint64_t seed,
                         const IterationObserver& observe) {
  if (g.node_count() == 0) throw std::invalid_argument("graph has no nodes");
  Rng rng(seed);
  Layout init = random_layout(g.node_count(), p.frame, rng);
  return dgc_layout_from(g, p, std::move(init), seed, observe);
}

ClassicResult dgc_layout_from(const Graph& g, const DgcParams& p, Layout init, std::uint64_t seed,
                              const IterationObserver& observe) {
  p.validate();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const DgcForceLaw law{p.ideal_length, p.elastic, p.repulsion_constant};
  return run_force_directed(g, law, p.cooling, p.convergence, std::move(init), rng, observe);
}

double total_stress(const Layout& l, const DistanceMatrix& d, double edge_length) {
  double sum = 0.0;
  const std::size_t n = d.size();
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const auto hops = d(u, v);
      if (hops == DistanceMatrix::kUnreachable) continue;
      const double h = static_cast<double>(hops);
      const double gap = distance(l[u], l[v]) - edge_length * h;
      sum += gap * gap / (h * h);
    }
  }
  return sum;
}

ClassicResult stress_majorize(const Graph& g, const StressParams& p, const DistanceMatrix& d,
                              std::uint64_t seed, const IterationObserver& observe) {
  if (g.node_count() == 0) throw std::invalid_argument("graph has no nodes");
  Rng rng(seed);
  Layout init = random_layout(g.node_count(), p.frame, rng);
  return stress_majorize_from(g, p, d, std::move(init), seed, observe);
}

namespace {

// Scales about the centroid by the factor minimizing total stress, so the
// first sweeps do not collapse a start drawn at the wrong scale.
Layout scaled_to_ideal(const Layout& l, const DistanceMatrix& d, double edge_length) {
  double num = 0.0, den = 0.0;
  for (NodeId u = 0; u < l.size(); ++u) {
    for (NodeId v = u + 1; v < l.size(); ++v) {
      if (!d.reachable(u, v)) continue;
      const double h = static_cast<double>(d(u, v));
      const double dist = distance(l[u], l[v]);
      num += dist * edge_length / h;
      den += dist * dist / (h * h);
    }
  }
  if (den == 0.0) return l;
  const double s = num / den;
  Vec2 c{};
  for (const Vec2& p : l.positions) c += p;
  c = c * (1.0 / static_cast<double>(l.size()));
  Layout out = l;
  for (Vec2& p : out.positions) p = c + (p - c) * s;
  return out;
}

}  // namespace

ClassicResult stress_majorize_from(const Graph& g, const StressParams& p, const DistanceMatrix& d,
                                   Layout init, std::uint64_t seed,
                                   const IterationObserver& observe) {
  p.validate();
  const std::size_t n = g.node_count();
  if (d.size() != n) throw std::invalid_argument("distance matrix does not match graph");
  if (init.size() != n) throw std::invalid_argument("initial layout does not match graph");

  Rng rng(seed ^ 0xd1b54a32d192ed03ULL);
  Layout layout = std::move(init);
  separate_coincident(layout, rng);
  double energy = total_stress(layout, d, p.edge_length);
  if (energy > 0.0) {
    const Layout scaled = scaled_to_ideal(layout, d, p.edge_length);
    const double scaled_energy = total_stress(scaled, d, p.edge_length);
    if (scaled_energy < energy) {
      layout = scaled;
      energy = scaled_energy;
    }
  }

  for (std::size_t it = 1; it <= p.max_iters; ++it) {
    if (energy == 0.0) return {std::move(layout), it - 1, ConvergenceReason::stress_ratio};

    Layout next = layout;
    double max_step = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      Vec2 target{};
      double weight_sum = 0.0;
      for (NodeId u = 0; u < n; ++u) {
        const auto hops = d(u, v);
        if (u == v || hops == DistanceMatrix::kUnreachable) continue;
        const double h = static_cast<double>(hops);
        const double w = 1.0 / (h * h);
        const Vec2 diff = next[v] - next[u];
        const double dist = norm(diff);
        Vec2 term = next[u];
        if (dist > 0.0) term += diff * (p.edge_length * h / dist);
        target += term * w;
        weight_sum += w;
      }
      if (weight_sum == 0.0) continue;
      const Vec2 moved = target * (1.0 / weight_sum);
      max_step = std::max(max_step, distance(moved, next[v]));
      next[v] = moved;
    }

    const double next_energy = total_stress(next, d, p.edge_length);
    if (next_energy > energy) return {std::move(layout), it - 1, ConvergenceReason::stress_ratio};
    layout = std::move(next);
    const double ratio = next_energy == 0.0 ? 0.0 : (energy - next_energy) / next_energy;
    energy = next_energy;
    if (observe) observe(IterationInfo{it, 0.0, max_step, energy}, layout);
    if (ratio < p.tolerance) return {std::move(layout), it, ConvergenceReason::stress_ratio};
  }
  return {std::move(layout), p.max_iters, ConvergenceReason::max_iterations};
}

}  // namespace marll
