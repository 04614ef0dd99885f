#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "marll/convergence.hpp"
#include "marll/cooling.hpp"
#include "marll/graph.hpp"
#include "marll/layout.hpp"

namespace marll {

struct FrParams {
  double k = 30.0;  // optimal distance, px
  CoolingSchedule cooling;
  ConvergenceConfig convergence;
  LayoutFrame frame;

  void validate() const;
};

struct DgcParams {
  double ideal_length = 30.0;           // λ, px
  double elastic = 5.0;                 // ζ
  double repulsion_constant = 5000.0;   // μ
  CoolingSchedule cooling;
  ConvergenceConfig convergence;
  LayoutFrame frame;

  void validate() const;
};

/// Weights are fixed at d'^-2; ideal distances are edge_length * d'.
struct StressParams {
  double edge_length = 30.0;  // px per hop
  double tolerance = 1e-4;    // stress-ratio threshold δE
  std::size_t max_iters = 2500;
  LayoutFrame frame;

  void validate() const;
};

struct ClassicResult {
  Layout layout;
  std::size_t iterations = 0;
  ConvergenceReason reason = ConvergenceReason::max_iterations;
};

struct IterationInfo {
  std::size_t iteration = 0;  // 1-based count of finished iterations
  double temperature = 0.0;   // cap applied during the iteration (force layouts)
  double max_step = 0.0;      // largest node displacement in the iteration
  double energy = 0.0;        // total stress after the sweep (majorization)
};

using IterationObserver = std::function<void(const IterationInfo&, const Layout&)>;

ClassicResult fr_layout(const Graph& g, const FrParams& p, std::uint64_t seed,
                        const IterationObserver& observe = {});
ClassicResult fr_layout_from(const Graph& g, const FrParams& p, Layout init, std::uint64_t seed,
                             const IterationObserver& observe = {});

ClassicResult dgc_layout(const Graph& g, const DgcParams& p, std::uint64_t seed,
                         const IterationObserver& observe = {});
ClassicResult dgc_layout_from(const Graph& g, const DgcParams& p, Layout init, std::uint64_t seed,
                              const IterationObserver& observe = {});

/// Localized (Gauss-Seidel) majorization: each node in turn moves to the
/// minimizer of its majorizing quadratic. A sweep that would raise the total
/// stress, which only happens through rounding at a fixed point, is
/// discarded and the run stops.
ClassicResult stress_majorize(const Graph& g, const StressParams& p, const DistanceMatrix& d,
                              std::uint64_t seed, const IterationObserver& observe = {});
ClassicResult stress_majorize_from(const Graph& g, const StressParams& p, const DistanceMatrix& d,
                                   Layout init, std::uint64_t seed,
                                   const IterationObserver& observe = {});

/// Σ_{u<v, reachable} d'^-2 (|p_u - p_v| - edge_length * d')^2.
double total_stress(const Layout& l, const DistanceMatrix& d, double edge_length = 1.0);

}  // namespace marll
