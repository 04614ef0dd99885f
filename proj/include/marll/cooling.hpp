#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace marll {

/// Geometric cooling of the per-move step length: T = T0 * factor^floor(t / period).
struct CoolingSchedule {
  double initial_step = 10.0;  // px
  double factor = 0.75;
  std::size_t period = 0;  // iterations between coolings; 0 means max(n + m, min_period)
  std::size_t min_period = 100;

  std::size_t resolve_period(std::size_t n, std::size_t m) const {
    if (period != 0) return period;
    return std::max<std::size_t>({n + m, min_period, 1});
  }

  double temperature(std::size_t iteration, std::size_t resolved_period) const {
    return initial_step * std::pow(factor, static_cast<double>(iteration / resolved_period));
  }

  void validate() const {
    if (!(initial_step > 0.0)) throw std::invalid_argument("initial step must be positive");
    if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("cooling factor must lie in (0, 1)");
  }
};

}  // namespace marll
