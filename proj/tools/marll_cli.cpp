// marll: graph layouts with classic and multi-agent Q-learning algorithms.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "marll/corpus.hpp"
#include "marll/harness.hpp"
#include "marll/metrics.hpp"
#include "marll/server.hpp"

namespace {

using marll::RunConfig;
using nlohmann::json;

constexpr int kExitBadInput = 2;
constexpr int kExitUnknownAlgorithm = 3;
constexpr int kExitAddressInUse = 4;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

class BadInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flags that override single RunConfig fields. Only flags given on the
/// command line are applied, after any --config file.
class Overrides {
 public:
  template <class T>
  void add(CLI::App* app, const std::string& flag, T RunConfig::*member, const std::string& help) {
    auto value = std::make_shared<T>(RunConfig{}.*member);
    CLI::Option* opt = app->add_option(flag, *value, help)->capture_default_str();
    appliers_.push_back([opt, value, member](RunConfig& c) {
      if (opt->count()) c.*member = *value;
    });
  }

  void add_weights(CLI::App* app) {
    auto value = std::make_shared<std::vector<double>>();
    CLI::Option* opt =
        app->add_option("--weights", *value, "custom reward weights w1..w5 (overlap crossing spacing length angle)")
            ->expected(5)
            ->delimiter(',');
    appliers_.push_back([opt, value](RunConfig& c) {
      if (!opt->count()) return;
      const auto& w = *value;
      c.weights = {w[0], w[1], w[2], w[3], w[4]};
    });
  }

  void apply(RunConfig& c) const {
    for (const auto& f : appliers_) f(c);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

struct Common {
  std::string config_file;
  bool print_config = false;
  std::optional<std::uint64_t> seed;
  Overrides overrides;
};

void add_common(CLI::App* app, Common& common) {
  app->add_option("--config", common.config_file, "JSON file with parameter overrides");
  app->add_flag("--print-config", common.print_config, "print the effective configuration and exit");
  app->add_option("--seed", common.seed, "random seed (falls back to MARLL_SEED, then 0)");
  auto& o = common.overrides;
  o.add(app, "--k", &RunConfig::k, "FR optimal edge length, px");
  o.add(app, "--lambda", &RunConfig::lambda, "DGC ideal edge length, px");
  o.add(app, "--zeta", &RunConfig::zeta, "DGC elastic constant");
  o.add(app, "--mu", &RunConfig::mu, "DGC repulsion constant");
  o.add(app, "--p-hops", &RunConfig::p_hops, "local stress neighbourhood, hops");
  o.add(app, "--L", &RunConfig::L, "desired edge length and minimum node distance, px");
  o.add_weights(app);
  o.add(app, "--beta", &RunConfig::beta, "hybrid reward mix");
  o.add(app, "--node-radius", &RunConfig::node_radius, "node radius for overlaps, px");
  o.add(app, "--initial-step", &RunConfig::initial_step, "initial temperature, px");
  o.add(app, "--cooling-factor", &RunConfig::cooling_factor, "geometric cooling factor");
  o.add(app, "--cooling-period", &RunConfig::cooling_period, "iterations between coolings (0: max(n+m, min))");
  o.add(app, "--min-cooling-period", &RunConfig::min_cooling_period, "lower bound of the automatic period");
  o.add(app, "--max-iters", &RunConfig::max_iters, "iteration cap M");
  o.add(app, "--min-avg-displacement", &RunConfig::min_avg_displacement, "threshold A, px");
  o.add(app, "--min-displacement-rate", &RunConfig::min_displacement_rate, "threshold dA, px");
  o.add(app, "--min-stress-ratio", &RunConfig::min_stress_ratio, "threshold dE");
  o.add(app, "--window", &RunConfig::window, "sweeps per convergence window (0: cooling period)");
  o.add(app, "--warmup-windows", &RunConfig::warmup_windows, "windows ignored before checking convergence");
  o.add(app, "--epsilon", &RunConfig::epsilon, "exploration rate");
  o.add(app, "--alpha", &RunConfig::alpha, "learning rate");
  o.add(app, "--gamma", &RunConfig::gamma, "discount factor");
  o.add(app, "--kappa", &RunConfig::kappa, "Metropolis reward scale");
  o.add(app, "--metropolis", &RunConfig::metropolis, "accept worsening moves with Metropolis probability");
  o.add(app, "--shared-q", &RunConfig::shared_q, "one Q-table shared by all agents");
  o.add(app, "--frame-width", &RunConfig::frame_width, "initial canvas width, px");
  o.add(app, "--frame-height", &RunConfig::frame_height, "initial canvas height, px");
}

std::uint64_t resolve_seed(const Common& common) {
  if (common.seed) return *common.seed;
  if (const char* env = std::getenv("MARLL_SEED")) {
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(env, &used);
      if (used == std::strlen(env)) return seed;
    } catch (const std::exception&) {
    }
    throw BadInput(std::string("MARLL_SEED is not an integer: ") + env);
  }
  return 0;
}

RunConfig resolve_config(const Common& common) {
  json doc = json::object();
  if (!common.config_file.empty()) {
    std::ifstream in(common.config_file);
    if (!in) throw BadInput("cannot read config file '" + common.config_file + "'");
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw BadInput("config file is not valid JSON: " + std::string(e.what()));
    }
  }
  try {
    RunConfig cfg = RunConfig::from_json(doc);
    common.overrides.apply(cfg);
    cfg.validate();
    return cfg;
  } catch (const std::invalid_argument& e) {
    throw BadInput(e.what());
  }
}

/// Bare builtin names ("karate", "g2") are accepted when no such file exists.
std::string resolve_graph_ref(const std::string& ref) {
  if (ref.starts_with("builtin:") || ref.starts_with("gen:") || std::filesystem::exists(ref)) return ref;
  for (const auto& name : marll::builtin_graph_names())
    if (name == ref) return "builtin:" + ref;
  return ref;
}

marll::GraphDocument load(const std::string& ref) {
  try {
    return marll::load_graph(resolve_graph_ref(ref));
  } catch (const std::exception& e) {
    throw BadInput(e.what());
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw BadInput("cannot write '" + path + "'");
  return &file;
}

int cmd_layout(const Common& common, const std::string& graph_ref, const std::string& algo,
               const std::string& output) {
  const marll::Algorithm algorithm = marll::parse_algorithm(algo);
  const RunConfig cfg = resolve_config(common);
  const std::uint64_t seed = resolve_seed(common);
  if (common.print_config) {
    std::cout << json{{"algorithm", algo}, {"seed", seed}, {"config", cfg.to_json()}}.dump(2) << '\n';
    return 0;
  }
  if (graph_ref.empty()) throw BadInput("--graph is required");
  const marll::GraphDocument doc = load(graph_ref);
  const auto run = marll::run_algorithm(doc.graph, algorithm, cfg, seed);
  const auto r = marll::report(run.layout, doc.graph, cfg.metrics_params());

  json out{{"graph", marll::graph_display_name(resolve_graph_ref(graph_ref))},
           {"algorithm", algo},
           {"seed", seed},
           {"n", doc.graph.node_count()},
           {"m", doc.graph.edge_count()},
           {"iterations", run.iterations},
           {"reason", marll::to_string(run.reason)},
           {"layout", marll::layout_to_json(run.layout, doc.graph)},
           {"metrics",
            {{"nc", r.nc}, {"no", r.no}, {"ne", r.ne}, {"na", r.na},
             {"crossings", r.crossings}, {"overlaps", r.overlaps}, {"reference_length", r.reference_length}}}};
  std::ofstream file;
  *open_output(output, file) << out.dump(2) << '\n';
  std::cerr << "marll: " << algo << " finished in " << run.iterations << " iterations ("
            << marll::to_string(run.reason) << "), " << run.runtime_ms << " ms\n";
  return 0;
}

int cmd_eval(const Common& common, const std::string& graphs, const std::string& algos, std::size_t runs,
             std::size_t jobs, const std::string& output, const std::string& summary) {
  std::vector<marll::Algorithm> algorithms;
  for (const auto& a : split_list(algos)) algorithms.push_back(marll::parse_algorithm(a));
  const RunConfig cfg = resolve_config(common);
  const std::uint64_t seed = resolve_seed(common);
  if (common.print_config) {
    std::cout << json{{"algorithms", split_list(algos)}, {"runs", runs}, {"seed", seed}, {"config", cfg.to_json()}}
                     .dump(2)
              << '\n';
    return 0;
  }
  if (runs == 0) throw BadInput("--runs must be at least 1");

  std::vector<marll::Aggregate> rows;
  for (const auto& ref : split_list(graphs)) {
    const marll::GraphDocument doc = load(ref);
    const std::string name = marll::graph_display_name(resolve_graph_ref(ref));
    for (const auto a : algorithms) {
      marll::TrialPlan plan{name, &doc.graph, a, runs, seed, cfg, jobs};
      rows.push_back(marll::run_trials(plan));
      const auto& agg = rows.back();
      std::cerr << "marll: " << name << " " << marll::to_string(a) << ": nc " << agg.nc.mean << " no "
                << agg.no.mean << " ne " << agg.ne.mean << " na " << agg.na.mean << ", "
                << agg.runtime_ms.mean << " ms/run\n";
    }
  }
  std::ofstream file;
  marll::export_csv(*open_output(output, file), rows);
  if (!summary.empty()) {
    std::ofstream s(summary);
    if (!s) throw BadInput("cannot write '" + summary + "'");
    s << marll::summary_json(rows).dump(2) << '\n';
  }
  return 0;
}

int cmd_serve(const std::string& host, std::uint16_t port) {
  try {
    marll::Server server({host, port});
    std::cout << "listening on " << host << ":" << server.port() << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.run(g_stop);
    return 0;
  } catch (const marll::AddressInUseError& e) {
    std::cerr << "marll: " << e.what() << '\n';
    return kExitAddressInUse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph layouts with classic and multi-agent Q-learning algorithms", "marll"};
  app.require_subcommand(1);

  std::string algorithm_list;
  for (auto a : marll::all_algorithms()) {
    if (!algorithm_list.empty()) algorithm_list += ", ";
    algorithm_list += marll::to_string(a);
  }

  Common layout_common;
  std::string layout_graph, layout_algo = "marl-fr", layout_output;
  CLI::App* layout = app.add_subcommand("layout", "run one layout and print it with its metrics as JSON");
  layout->add_option("--graph,-g", layout_graph, "graph file, builtin:NAME or gen:SPEC");
  layout->add_option("--algo,-a", layout_algo, "one of: " + algorithm_list)->capture_default_str();
  layout->add_option("--output,-o", layout_output, "output file (default stdout)");
  add_common(layout, layout_common);

  Common eval_common;
  std::string eval_graphs = "builtin:karate", eval_algos = "fr,marl-fr", eval_output, eval_summary;
  std::size_t eval_runs = 100, eval_jobs = 1;
  CLI::App* eval = app.add_subcommand("eval", "repeated trials per graph and algorithm, written as CSV");
  eval->add_option("--graphs", eval_graphs, "comma-separated graph references")->capture_default_str();
  eval->add_option("--algos", eval_algos, "comma-separated algorithms")->capture_default_str();
  eval->add_option("--runs", eval_runs, "trials per graph and algorithm")->capture_default_str();
  eval->add_option("--jobs,-j", eval_jobs, "parallel trials")->capture_default_str();
  eval->add_option("--output,-o", eval_output, "CSV output file (default stdout)");
  eval->add_option("--summary", eval_summary, "also write a JSON summary with ratio tables");
  add_common(eval, eval_common);

  std::string serve_host = "127.0.0.1";
  std::uint16_t serve_port = 8765;
  CLI::App* serve = app.add_subcommand("serve", "run the live session server");
  serve->add_option("--host", serve_host, "listen address")->capture_default_str();
  serve->add_option("--port,-p", serve_port, "TCP port (0: ephemeral)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (layout->parsed()) return cmd_layout(layout_common, layout_graph, layout_algo, layout_output);
    if (eval->parsed()) {
      return cmd_eval(eval_common, eval_graphs, eval_algos, eval_runs, eval_jobs, eval_output, eval_summary);
    }
    return cmd_serve(serve_host, serve_port);
  } catch (const marll::UnknownAlgorithmError& e) {
    std::cerr << "marll: " << e.what() << "\n\n" << (layout->parsed() ? layout->help() : eval->help());
    return kExitUnknownAlgorithm;
  } catch (const BadInput& e) {
    std::cerr << "marll: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "marll: " << e.what() << '\n';
    return 1;
  }
}
