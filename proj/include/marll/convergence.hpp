#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace marll {

enum class ConvergenceReason { max_iterations, avg_displacement, displacement_rate, stress_ratio };

std::string_view to_string(ConvergenceReason reason);
std::optional<ConvergenceReason> parse_convergence_reason(std::string_view text);

/// Which of the optional criteria a run watches. The iteration cap is
/// always active.
struct CriteriaSet {
  bool avg_displacement = false;
  bool displacement_rate = false;
  bool stress_ratio = false;
};

inline constexpr CriteriaSet kForceCriteria{true, true, false};
inline constexpr CriteriaSet kStressCriteria{false, false, true};
inline constexpr CriteriaSet kHybridCriteria{false, true, true};

struct ConvergenceConfig {
  std::size_t max_iters = 2500;
  double min_avg_displacement = 5.0;   // px
  double min_displacement_rate = 2.0;  // px
  double min_stress_ratio = 1e-4;
  // Sweeps per measurement window; 0 means "one cooling period".
  std::size_t window = 0;
  // Closed windows ignored before the window criteria are consulted. The
  // first window holds the transient from the random start.
  std::size_t warmup_windows = 1;
  // Overrides the algorithm's default criteria when set.
  std::optional<CriteriaSet> criteria;

  void validate() const;
};

/// Measurements from the most recently closed window. A is the per-node
/// path length travelled during the window (the mean per-sweep displacement
/// summed over its sweeps), so a one-sweep window gives the plain A(t).
struct ConvergenceTelemetry {
  std::size_t iteration = 0;
  bool window_closed = false;  // true when a window ended at `iteration`
  std::size_t windows_closed = 0;
  std::optional<double> avg_displacement;
  std::optional<double> displacement_rate;  // |A - A_prev|
  std::optional<double> stress_ratio;       // (E - E_prev) / E, signed
  std::optional<double> energy;
};

/// First satisfied criterion in the order: iteration cap, average
/// displacement, displacement rate, stress ratio. Window criteria are only
/// consulted on the iteration that closed a window, once more than
/// `warmup_windows` windows have closed. The stress ratio fires
/// only when energy did not increase.
std::optional<ConvergenceReason> evaluate_convergence(const ConvergenceConfig& cfg,
                                                      const CriteriaSet& active,
                                                      const ConvergenceTelemetry& telemetry);

class ConvergenceMonitor {
 public:
  ConvergenceMonitor(ConvergenceConfig cfg, CriteriaSet active, std::size_t window);

  /// True when the next record() closes a window and needs the energy.
  bool energy_due() const { return active_.stress_ratio && sweeps_ + 1 >= window_; }

  /// Records one finished iteration with its mean node displacement.
  void record(double step_displacement, std::optional<double> energy = std::nullopt);

  std::optional<ConvergenceReason> check() const {
    return evaluate_convergence(cfg_, active_, telemetry_);
  }
  const ConvergenceTelemetry& telemetry() const { return telemetry_; }
  const ConvergenceConfig& config() const { return cfg_; }
  const CriteriaSet& criteria() const { return active_; }
  std::size_t window() const { return window_; }

  void set_config(const ConvergenceConfig& cfg) { cfg_ = cfg; }

 private:
  ConvergenceConfig cfg_;
  CriteriaSet active_;
  std::size_t window_;
  std::size_t sweeps_ = 0;
  double accumulated_ = 0.0;
  std::optional<double> prev_displacement_;
  std::optional<double> prev_energy_;
  ConvergenceTelemetry telemetry_;
};

}  // namespace marll
