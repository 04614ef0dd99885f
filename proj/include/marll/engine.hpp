#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "marll/convergence.hpp"
#include "marll/cooling.hpp"
#include "marll/graph.hpp"
#include "marll/layout.hpp"
#include "marll/random.hpp"
#include "marll/rewards.hpp"

namespace marll {

/// The nine moves. The enumeration order is also the greedy tie-break order.
enum class Action : std::uint8_t { stay, north, south, east, west, north_east, north_west, south_east, south_west };

inline constexpr std::size_t kActionCount = 9;
inline constexpr std::size_t kStateCount = 9;
inline constexpr std::array<Action, kActionCount> kAllActions{
    Action::stay,       Action::north,      Action::south,      Action::east,      Action::west,
    Action::north_east, Action::north_west, Action::south_east, Action::south_west};

/// Unit displacement (zero for stay); north is +y.
Vec2 direction(Action a);
/// Cell of the 3x3 grid the action points into, row-major from the
/// north-west corner; stay is the centre cell 4.
int cell_of(Action a);
std::string_view to_string(Action a);

/// One agent state: the grid cell of its last executed action.
using AgentState = int;
inline constexpr AgentState kCenterState = 4;

class QTable {
 public:
  double& operator()(AgentState s, Action a) { return q_[index(s, a)]; }
  double operator()(AgentState s, Action a) const { return q_[index(s, a)]; }
  double max(AgentState s) const;
  /// First action in kAllActions order with the highest value.
  Action argmax(AgentState s) const;
  bool all_finite() const;
  void clear() { q_.fill(0.0); }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  static std::size_t index(AgentState s, Action a) {
    return static_cast<std::size_t>(s) * kActionCount + static_cast<std::size_t>(a);
  }
  std::array<double, kStateCount * kActionCount> q_{};
};

/// ε-greedy: one uniform draw decides between exploring (uniform action) and
/// the greedy argmax.
Action select_action(const QTable& q, AgentState s, double epsilon, Rng& rng);

/// q[s,a] ← (1-α)q[s,a] + α(r + γ max_a' q[s',a']). Throws
/// std::invalid_argument for a non-finite reward.
void q_update(QTable& q, AgentState s, Action a, AgentState next, double reward, double alpha,
              double gamma);

struct LearnConfig {
  double alpha = 0.3;
  double gamma = 0.5;
  double epsilon = 0.1;
  CoolingSchedule cooling;
  bool metropolis = true;
  double kappa = 1.0;  // reward scale in the acceptance test exp(r / (κT))
  bool shared_q = true;

  void validate() const;
};

struct SessionConfig {
  LearnConfig learn;
  ConvergenceConfig convergence;
  LayoutFrame frame;

  void validate() const;
};

/// Criteria watched by default for each reward kind.
CriteriaSet default_criteria(RewardKind kind);

struct MoveRecord {
  NodeId node = 0;
  Action action = Action::stay;
  double reward = 0.0;  // realized: 0 when the move was rejected
  bool accepted = true;
  bool locked = false;
};

struct StepReport {
  std::size_t iteration = 0;        // sweeps finished, including this one
  double temperature = 0.0;         // step length used during the sweep
  double mean_displacement = 0.0;   // mean node displacement over the sweep
  ConvergenceTelemetry telemetry;
  std::vector<MoveRecord> moves;
};

struct RunResult {
  Layout layout;
  ConvergenceReason reason = ConvergenceReason::max_iterations;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
};

struct HistoryEntry {
  std::size_t iteration = 0;
  double mean_displacement = 0.0;
  std::optional<double> energy;
};

/// One MARL layout run. Single-writer: callers serialize access.
class Session {
 public:
  static constexpr std::size_t kHistoryCapacity = 512;

  Session(Graph g, RewardSpec spec, SessionConfig cfg, std::uint64_t seed,
          std::optional<Layout> initial = std::nullopt);

  /// One sweep over the agents in ascending node id, then cooling.
  StepReport step();
  std::optional<ConvergenceReason> check_convergence() const { return monitor_.check(); }
  RunResult run_until_converged(const std::function<void(const StepReport&)>& observe = {});

  void lock_node(NodeId v);
  void unlock_node(NodeId v);
  bool is_locked(NodeId v) const;
  std::vector<NodeId> locked_nodes() const;
  /// Places v at `pos` immediately; treated as an accepted external move.
  void move_node(NodeId v, Vec2 pos);

  /// Clears learned values, agent states, iteration count, temperature and
  /// convergence history. Positions are re-drawn from the seed when
  /// `reinitialize_layout` is set. Locks are kept.
  void reset(bool reinitialize_layout);

  void set_learn_config(const LearnConfig& learn);
  void set_convergence_config(const ConvergenceConfig& cfg);
  void set_reward(const RewardSpec& spec);

  const Graph& graph() const { return graph_; }
  const Layout& layout() const { return layout_; }
  const RewardSpec& reward() const { return spec_; }
  const SessionConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t iteration() const { return iteration_; }
  double temperature() const;
  std::size_t cooling_period() const { return period_; }
  const ConvergenceTelemetry& telemetry() const { return monitor_.telemetry(); }
  const std::deque<HistoryEntry>& history() const { return history_; }
  const QTable& q_table(NodeId v = 0) const { return q_[cfg_.learn.shared_q ? 0 : v]; }
  AgentState state(NodeId v) const { return states_.at(v); }
  /// Computed on first use by a stress reward.
  const DistanceMatrix& distances();

  /// Objective of agent v at the current layout. For the global stress
  /// kind this is the part of the total that involves v.
  double agent_objective(NodeId v);
  /// Total stress at the current layout, in the reward's length unit.
  double energy();

  nlohmann::json snapshot() const;

 private:
  QTable& table_for(NodeId v) { return q_[cfg_.learn.shared_q ? 0 : v]; }
  ConvergenceMonitor make_monitor() const;
  void check_node(NodeId v) const;

  Graph graph_;
  RewardSpec spec_;
  SessionConfig cfg_;
  std::uint64_t seed_;
  Rng rng_;
  Layout layout_;
  std::optional<DistanceMatrix> dist_;
  std::vector<QTable> q_;
  std::vector<AgentState> states_;
  std::vector<bool> locked_;
  std::size_t iteration_ = 0;
  std::size_t period_ = 1;
  ConvergenceMonitor monitor_;
  std::deque<HistoryEntry> history_;
};

Session init_session(const Graph& g, const RewardSpec& spec, const SessionConfig& cfg,
                     std::uint64_t seed);

}  // namespace marll
