#include "marll/convergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace marll {

std::string_view to_string(ConvergenceReason reason) {
  switch (reason) {
    case ConvergenceReason::max_iterations: return "max_iterations";
    case ConvergenceReason::avg_displacement: return "avg_displacement";
    case ConvergenceReason::displacement_rate: return "displacement_rate";
    case ConvergenceReason::stress_ratio: return "stress_ratio";
  }
  return "unknown";
}

std::optional<ConvergenceReason> parse_convergence_reason(std::string_view text) {
  for (auto r : {ConvergenceReason::max_iterations, ConvergenceReason::avg_displacement,
                 ConvergenceReason::displacement_rate, ConvergenceReason::stress_ratio}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

void ConvergenceConfig::validate() const {
  if (max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  if (!(min_avg_displacement > 0.0) || !(min_displacement_rate > 0.0) || !(min_stress_ratio > 0.0)) {
    throw std::invalid_argument("convergence thresholds must be positive");
  }
}

std::optional<ConvergenceReason> evaluate_convergence(const ConvergenceConfig& cfg,
                                                      const CriteriaSet& active,
                                                      const ConvergenceTelemetry& t) {
  if (t.iteration >= cfg.max_iters) return ConvergenceReason::max_iterations;
  if (!t.window_closed || t.windows_closed <= cfg.warmup_windows) return std::nullopt;
  if (active.avg_displacement && t.avg_displacement && *t.avg_displacement < cfg.min_avg_displacement) {
    return ConvergenceReason::avg_displacement;
  }
  if (active.displacement_rate && t.displacement_rate &&
      *t.displacement_rate < cfg.min_displacement_rate) {
    return ConvergenceReason::displacement_rate;
  }
  if (active.stress_ratio && t.stress_ratio && *t.stress_ratio <= 0.0 &&
      -*t.stress_ratio < cfg.min_stress_ratio) {
    return ConvergenceReason::stress_ratio;
  }
  return std::nullopt;
}

ConvergenceMonitor::ConvergenceMonitor(ConvergenceConfig cfg, CriteriaSet active, std::size_t window)
    : cfg_(cfg), active_(active), window_(window == 0 ? 1 : window) {
  cfg_.validate();
}

void ConvergenceMonitor::record(double step_displacement, std::optional<double> energy) {
  ++telemetry_.iteration;
  accumulated_ += step_displacement;
  ++sweeps_;
  telemetry_.window_closed = sweeps_ >= window_;
  if (!telemetry_.window_closed) return;
  ++telemetry_.windows_closed;

  const double a = accumulated_;
  telemetry_.avg_displacement = a;
  telemetry_.displacement_rate =
      prev_displacement_ ? std::optional<double>(std::abs(a - *prev_displacement_)) : std::nullopt;
  prev_displacement_ = a;
  accumulated_ = 0.0;
  sweeps_ = 0;

  if (energy) {
    if (prev_energy_) {
      const double e = *energy, prev = *prev_energy_;
      if (e == 0.0) {
        telemetry_.stress_ratio = prev == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
      } else {
        telemetry_.stress_ratio = (e - prev) / e;
      }
    }
    prev_energy_ = energy;
    telemetry_.energy = energy;
  }
}

}  // namespace marll
