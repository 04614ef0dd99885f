#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "marll/classic.hpp"
#include "marll/engine.hpp"
#include "marll/metrics.hpp"
#include "marll/rewards.hpp"

namespace marll {

enum class Algorithm {
  fr,
  dgc,
  sm,
  marl_fr,
  marl_dgc,
  marl_local_stress,
  marl_global_stress,
  marl_hybrid,
  marl_custom,
};

class UnknownAlgorithmError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string_view to_string(Algorithm a);
/// Throws UnknownAlgorithmError.
Algorithm parse_algorithm(std::string_view text);
std::vector<Algorithm> all_algorithms();
bool is_marl(Algorithm a);
/// The classic algorithm a MARL variant is compared against, if any.
std::optional<Algorithm> classic_counterpart(Algorithm a);

/// Every tunable of every algorithm, with the published defaults.
struct RunConfig {
  // force laws
  double k = 30.0;
  double lambda = 30.0;
  double zeta = 5.0;
  double mu = 5000.0;
  // stress and custom rewards
  std::uint32_t p_hops = 10;
  double L = 30.0;  // desired edge length / minimum node distance / px per hop
  CustomWeights weights;
  double beta = 0.5;
  double node_radius = 10.0;
  // cooling
  double initial_step = 10.0;
  double cooling_factor = 0.75;
  std::size_t cooling_period = 0;  // 0: max(n + m, min_cooling_period)
  std::size_t min_cooling_period = 100;
  // convergence
  std::size_t max_iters = 2500;
  double min_avg_displacement = 5.0;
  double min_displacement_rate = 2.0;
  double min_stress_ratio = 1e-4;
  std::size_t window = 0;
  std::size_t warmup_windows = 1;
  // learning
  double epsilon = 0.1;
  double alpha = 0.3;
  double gamma = 0.5;
  double kappa = 1.0;
  bool metropolis = true;
  bool shared_q = true;
  // canvas
  double frame_width = 1000.0;
  double frame_height = 1000.0;

  void validate() const;
  nlohmann::json to_json() const;
  /// Starts from the defaults; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& doc);

  CoolingSchedule cooling() const;
  ConvergenceConfig convergence() const;
  LayoutFrame frame() const;
  FrParams fr_params() const;
  DgcParams dgc_params() const;
  StressParams stress_params() const;
  SessionConfig session_config() const;
  /// Reward for a MARL algorithm; throws std::invalid_argument for classic ones.
  RewardSpec reward_for(Algorithm a) const;
  MetricsParams metrics_params() const;
};

struct LayoutRun {
  Layout layout;
  std::size_t iterations = 0;
  ConvergenceReason reason = ConvergenceReason::max_iterations;
  double runtime_ms = 0.0;
};

LayoutRun run_algorithm(const Graph& g, Algorithm a, const RunConfig& cfg, std::uint64_t seed);

struct TrialPlan {
  std::string graph_name;
  const Graph* graph = nullptr;
  Algorithm algorithm = Algorithm::fr;
  std::size_t n_runs = 100;
  std::uint64_t base_seed = 0;
  RunConfig config;
  std::size_t jobs = 1;
};

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

struct Aggregate {
  std::string graph;
  std::string algorithm;
  std::uint64_t base_seed = 0;
  std::size_t runs = 0;
  Stat nc, no, ne, na;
  Stat iterations;
  Stat runtime_ms;
  std::vector<MetricsReport> trials;  // sorted by seed

  nlohmann::json to_json() const;
};

/// Trial i uses seed base_seed + i. Throws std::invalid_argument for an
/// empty plan or a missing graph.
Aggregate run_trials(const TrialPlan& plan);
/// Mean and standard deviation over the given reports, in seed order.
Aggregate aggregate(std::vector<MetricsReport> trials, std::string graph, std::string algorithm);

struct RatioRow {
  double nc = 1.0, no = 1.0, ne = 1.0, na = 1.0;
  double runtime = 1.0;
  // Set when a denominator was zero; the ratio is then 1 for 0/0 and
  // infinity otherwise.
  bool nc_flag = false, no_flag = false, ne_flag = false, na_flag = false, runtime_flag = false;

  nlohmann::json to_json() const;
};

RatioRow ratio_table(const Aggregate& marl, const Aggregate& classic);

/// graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms,runs,nc_std,no_std,ne_std,na_std
std::string csv_header();
void export_csv(std::ostream& out, const std::vector<Aggregate>& rows);
/// Parses export_csv output; trials are not stored and come back empty.
std::vector<Aggregate> read_csv(std::istream& in);

/// {"graphs": {graph: {algorithm: aggregate}}, "ratios": {graph: {marl algorithm: ratios}}}
nlohmann::json summary_json(const std::vector<Aggregate>& rows);

}  // namespace marll
