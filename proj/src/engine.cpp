#include "marll/engine.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "marll/classic.hpp"

namespace marll {

namespace {

constexpr double kDiag = std::numbers::sqrt2 / 2.0;

double reward_length_unit(const RewardSpec& spec) {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FrForceReward>) return r.k;
        else if constexpr (std::is_same_v<T, DgcForceReward>) return r.ideal_length;
        else if constexpr (std::is_same_v<T, CustomReward>) return r.desired_length;
        else return r.edge_length;
      },
      spec);
}

}  // namespace

Vec2 direction(Action a) {
  switch (a) {
    case Action::stay: return {0.0, 0.0};
    case Action::north: return {0.0, 1.0};
    case Action::south: return {0.0, -1.0};
    case Action::east: return {1.0, 0.0};
    case Action::west: return {-1.0, 0.0};
    case Action::north_east: return {kDiag, kDiag};
    case Action::north_west: return {-kDiag, kDiag};
    case Action::south_east: return {kDiag, -kDiag};
    case Action::south_west: return {-kDiag, -kDiag};
  }
  return {};
}

int cell_of(Action a) {
  switch (a) {
    case Action::north_west: return 0;
    case Action::north: return 1;
    case Action::north_east: return 2;
    case Action::west: return 3;
    case Action::stay: return 4;
    case Action::east: return 5;
    case Action::south_west: return 6;
    case Action::south: return 7;
    case Action::south_east: return 8;
  }
  return kCenterState;
}

std::string_view to_string(Action a) {
  static constexpr std::string_view names[] = {"stay", "N", "S", "E", "W", "NE", "NW", "SE", "SW"};
  return names[static_cast<std::size_t>(a)];
}

double QTable::max(AgentState s) const { return (*this)(s, argmax(s)); }

Action QTable::argmax(AgentState s) const {
  Action best = Action::stay;
  for (Action a : kAllActions) {
    if ((*this)(s, a) > (*this)(s, best)) best = a;
  }
  return best;
}

bool QTable::all_finite() const {
  for (double x : q_)
    if (!std::isfinite(x)) return false;
  return true;
}

Action select_action(const QTable& q, AgentState s, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return kAllActions[rng.index(kActionCount)];
  return q.argmax(s);
}

void q_update(QTable& q, AgentState s, Action a, AgentState next, double reward, double alpha,
              double gamma) {
  if (!std::isfinite(reward)) throw std::invalid_argument("reward must be finite");
  q(s, a) = (1.0 - alpha) * q(s, a) + alpha * (reward + gamma * q.max(next));
}

void LearnConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  cooling.validate();
}

void SessionConfig::validate() const {
  learn.validate();
  convergence.validate();
  if (!(frame.width > 0.0 && frame.height > 0.0)) throw std::invalid_argument("frame must be non-empty");
}

CriteriaSet default_criteria(RewardKind kind) {
  switch (kind) {
    case RewardKind::local_stress:
    case RewardKind::global_stress: return kStressCriteria;
    case RewardKind::hybrid: return kHybridCriteria;
    default: return kForceCriteria;
  }
}

Session::Session(Graph g, RewardSpec spec, SessionConfig cfg, std::uint64_t seed,
                 std::optional<Layout> initial)
    : graph_(std::move(g)),
      spec_(std::move(spec)),
      cfg_(cfg),
      seed_(seed),
      rng_(seed),
      monitor_(cfg.convergence, kForceCriteria, 1) {
  if (graph_.node_count() == 0) throw std::invalid_argument("graph has no nodes");
  validate(spec_);
  cfg_.validate();
  const std::size_t n = graph_.node_count();
  if (initial) {
    if (initial->size() != n) throw std::invalid_argument("initial layout does not match graph");
    if (!initial->all_finite()) throw std::invalid_argument("initial layout has non-finite positions");
    layout_ = std::move(*initial);
  } else {
    layout_ = random_layout(n, cfg_.frame, rng_);
  }
  q_.assign(cfg_.learn.shared_q ? 1 : n, QTable{});
  states_.assign(n, kCenterState);
  locked_.assign(n, false);
  period_ = cfg_.learn.cooling.resolve_period(n, graph_.edge_count());
  monitor_ = make_monitor();
}

ConvergenceMonitor Session::make_monitor() const {
  const auto& c = cfg_.convergence;
  return ConvergenceMonitor(c, c.criteria.value_or(default_criteria(kind_of(spec_))),
                            c.window ? c.window : period_);
}

double Session::temperature() const { return cfg_.learn.cooling.temperature(iteration_, period_); }

const DistanceMatrix& Session::distances() {
  if (!dist_) dist_ = all_pairs_hop_distance(graph_);
  return *dist_;
}

double Session::agent_objective(NodeId v) {
  const DistanceMatrix* d = needs_distances(spec_) ? &distances() : nullptr;
  if (const auto* r = std::get_if<GlobalStressReward>(&spec_)) {
    return stress_terms_of(v, layout_, *d, r->edge_length);
  }
  return evaluate_objective(spec_, v, layout_, graph_, d).value;
}

double Session::energy() { return total_stress(layout_, distances(), reward_length_unit(spec_)); }

StepReport Session::step() {
  const std::size_t n = graph_.node_count();
  const auto& learn = cfg_.learn;
  const double T = temperature();

  StepReport report;
  report.temperature = T;
  report.moves.reserve(n);
  const std::vector<Vec2> before = layout_.positions;

  for (NodeId v = 0; v < n; ++v) {
    MoveRecord rec{v, Action::stay, 0.0, true, locked_[v]};
    if (locked_[v]) {
      report.moves.push_back(rec);
      continue;
    }
    separate_from_others(layout_, v, rng_);

    QTable& q = table_for(v);
    const AgentState s = states_[v];
    const Action a = select_action(q, s, learn.epsilon, rng_);
    rec.action = a;

    double reward = 0.0;
    bool accepted = true;
    if (a != Action::stay) {
      const double objective_before = agent_objective(v);
      const Vec2 old = layout_[v];
      layout_[v] = old + direction(a) * T;
      const double r = objective_before - agent_objective(v);
      if (!std::isfinite(r)) {
        throw std::domain_error("objective became non-finite for node " + std::to_string(v));
      }
      accepted = r >= 0.0 || (learn.metropolis && rng_.uniform() < std::exp(r / (learn.kappa * T)));
      if (accepted) {
        reward = r;
      } else {
        layout_[v] = old;
      }
    }
    const AgentState next = accepted ? cell_of(a) : s;
    q_update(q, s, a, next, reward, learn.alpha, learn.gamma);
    states_[v] = next;

    rec.reward = reward;
    rec.accepted = accepted;
    report.moves.push_back(rec);
  }

  double moved = 0.0;
  for (NodeId v = 0; v < n; ++v) moved += distance(before[v], layout_[v]);
  report.mean_displacement = moved / static_cast<double>(n);

  ++iteration_;
  std::optional<double> e;
  if (monitor_.energy_due()) e = energy();
  monitor_.record(report.mean_displacement, e);

  history_.push_back({iteration_, report.mean_displacement, e});
  if (history_.size() > kHistoryCapacity) history_.pop_front();

  report.iteration = iteration_;
  report.telemetry = monitor_.telemetry();
  return report;
}

RunResult Session::run_until_converged(const std::function<void(const StepReport&)>& observe) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<ConvergenceReason> reason = check_convergence();
  while (!reason) {
    const StepReport r = step();
    if (observe) observe(r);
    reason = check_convergence();
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  return {layout_, *reason, iteration_, std::chrono::duration<double, std::milli>(elapsed).count()};
}

void Session::check_node(NodeId v) const {
  if (v >= graph_.node_count()) throw std::out_of_range("unknown node id " + std::to_string(v));
}

void Session::lock_node(NodeId v) {
  check_node(v);
  locked_[v] = true;
}

void Session::unlock_node(NodeId v) {
  check_node(v);
  locked_[v] = false;
}

bool Session::is_locked(NodeId v) const {
  check_node(v);
  return locked_[v];
}

std::vector<NodeId> Session::locked_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < locked_.size(); ++v)
    if (locked_[v]) out.push_back(v);
  return out;
}

void Session::move_node(NodeId v, Vec2 pos) {
  check_node(v);
  if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) throw std::invalid_argument("position must be finite");
  layout_[v] = pos;
}

void Session::reset(bool reinitialize_layout) {
  for (auto& q : q_) q.clear();
  states_.assign(graph_.node_count(), kCenterState);
  iteration_ = 0;
  history_.clear();
  monitor_ = make_monitor();
  if (reinitialize_layout) {
    rng_ = Rng(seed_);
    layout_ = random_layout(graph_.node_count(), cfg_.frame, rng_);
  }
}

void Session::set_learn_config(const LearnConfig& learn) {
  learn.validate();
  const bool tables_changed = learn.shared_q != cfg_.learn.shared_q;
  cfg_.learn = learn;
  period_ = learn.cooling.resolve_period(graph_.node_count(), graph_.edge_count());
  if (tables_changed) q_.assign(learn.shared_q ? 1 : graph_.node_count(), QTable{});
}

void Session::set_convergence_config(const ConvergenceConfig& cfg) {
  cfg.validate();
  const bool same_shape = cfg.window == cfg_.convergence.window && cfg.criteria.has_value() ==
                                                                       cfg_.convergence.criteria.has_value();
  cfg_.convergence = cfg;
  if (same_shape && !cfg.criteria) {
    monitor_.set_config(cfg);
  } else {
    monitor_ = make_monitor();
  }
}

void Session::set_reward(const RewardSpec& spec) {
  validate(spec);
  const bool kind_changed = kind_of(spec) != kind_of(spec_);
  spec_ = spec;
  if (kind_changed) monitor_ = make_monitor();
}

nlohmann::json Session::snapshot() const {
  using nlohmann::json;
  json positions = json::array();
  for (const Vec2& p : layout_.positions) positions.push_back({p.x, p.y});
  const auto& t = monitor_.telemetry();
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  const auto reason = check_convergence();
  return {
      {"iteration", iteration_},
      {"temperature", temperature()},
      {"positions", positions},
      {"mean_displacement", history_.empty() ? json(nullptr) : json(history_.back().mean_displacement)},
      {"A", opt(t.avg_displacement)},
      {"dA", opt(t.displacement_rate)},
      {"dE", opt(t.stress_ratio)},
      {"energy", opt(t.energy)},
      {"locked", locked_nodes()},
      {"epsilon", cfg_.learn.epsilon},
      {"reward", to_json(spec_)},
      {"converged", reason ? json(std::string(to_string(*reason))) : json(nullptr)},
  };
}

Session init_session(const Graph& g, const RewardSpec& spec, const SessionConfig& cfg,
                     std::uint64_t seed) {
  return Session(g, spec, cfg, seed);
}

}  // namespace marll
