#include "marll/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "marll/graph.hpp"

namespace marll {

using nlohmann::json;

namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {
    {Algorithm::fr, "fr"},
    {Algorithm::dgc, "dgc"},
    {Algorithm::sm, "sm"},
    {Algorithm::marl_fr, "marl-fr"},
    {Algorithm::marl_dgc, "marl-dgc"},
    {Algorithm::marl_local_stress, "marl-local-stress"},
    {Algorithm::marl_global_stress, "marl-global-stress"},
    {Algorithm::marl_hybrid, "marl-hybrid"},
    {Algorithm::marl_custom, "marl-custom"},
};

template <class Self, class F>
void visit_fields(Self& c, F&& f) {
  f("k", c.k);
  f("lambda", c.lambda);
  f("zeta", c.zeta);
  f("mu", c.mu);
  f("p_hops", c.p_hops);
  f("L", c.L);
  f("beta", c.beta);
  f("node_radius", c.node_radius);
  f("initial_step", c.initial_step);
  f("cooling_factor", c.cooling_factor);
  f("cooling_period", c.cooling_period);
  f("min_cooling_period", c.min_cooling_period);
  f("max_iters", c.max_iters);
  f("min_avg_displacement", c.min_avg_displacement);
  f("min_displacement_rate", c.min_displacement_rate);
  f("min_stress_ratio", c.min_stress_ratio);
  f("window", c.window);
  f("warmup_windows", c.warmup_windows);
  f("epsilon", c.epsilon);
  f("alpha", c.alpha);
  f("gamma", c.gamma);
  f("kappa", c.kappa);
  f("metropolis", c.metropolis);
  f("shared_q", c.shared_q);
  f("frame_width", c.frame_width);
  f("frame_height", c.frame_height);
}

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

double ratio(double num, double den, bool& flag) {
  if (den != 0.0) return num / den;
  flag = true;
  return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

std::string format_double(double x) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& [alg, name] : kAlgorithmNames)
    if (alg == a) return name;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
  for (const auto& [alg, name] : kAlgorithmNames)
    if (name == text) return alg;
  throw UnknownAlgorithmError("unknown algorithm '" + std::string(text) + "'");
}

std::vector<Algorithm> all_algorithms() {
  std::vector<Algorithm> out;
  for (const auto& entry : kAlgorithmNames) out.push_back(entry.first);
  return out;
}

bool is_marl(Algorithm a) { return a != Algorithm::fr && a != Algorithm::dgc && a != Algorithm::sm; }

std::optional<Algorithm> classic_counterpart(Algorithm a) {
  switch (a) {
    case Algorithm::marl_fr: return Algorithm::fr;
    case Algorithm::marl_dgc: return Algorithm::dgc;
    case Algorithm::marl_local_stress:
    case Algorithm::marl_global_stress: return Algorithm::sm;
    default: return std::nullopt;
  }
}

void RunConfig::validate() const {
  fr_params().validate();
  dgc_params().validate();
  stress_params().validate();
  session_config().validate();
  for (Algorithm a : all_algorithms())
    if (is_marl(a)) marll::validate(reward_for(a));
  if (!(frame_width > 0.0 && frame_height > 0.0)) throw std::invalid_argument("frame must be non-empty");
}

json RunConfig::to_json() const {
  json out = json::object();
  visit_fields(*this, [&](const char* name, const auto& value) { out[name] = value; });
  out["weights"] = {weights.overlap, weights.crossing, weights.spacing, weights.edge_length, weights.angle};
  return out;
}

RunConfig RunConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  RunConfig c;
  std::size_t matched = 0;
  try {
    visit_fields(c, [&](const char* name, auto& value) {
      if (auto it = doc.find(name); it != doc.end()) {
        value = it->template get<std::decay_t<decltype(value)>>();
        ++matched;
      }
    });
    if (auto it = doc.find("weights"); it != doc.end()) {
      if (!it->is_array() || it->size() != 5) throw std::invalid_argument("weights must hold 5 numbers");
      c.weights = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(),
                   (*it)[3].get<double>(), (*it)[4].get<double>()};
      ++matched;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  if (matched != doc.size()) {
    const json known = c.to_json();
    for (const auto& [key, _] : doc.items())
      if (!known.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

CoolingSchedule RunConfig::cooling() const {
  return {initial_step, cooling_factor, cooling_period, min_cooling_period};
}

ConvergenceConfig RunConfig::convergence() const {
  ConvergenceConfig c;
  c.max_iters = max_iters;
  c.min_avg_displacement = min_avg_displacement;
  c.min_displacement_rate = min_displacement_rate;
  c.min_stress_ratio = min_stress_ratio;
  c.window = window;
  c.warmup_windows = warmup_windows;
  return c;
}

LayoutFrame RunConfig::frame() const { return {frame_width, frame_height}; }

FrParams RunConfig::fr_params() const { return {k, cooling(), convergence(), frame()}; }

DgcParams RunConfig::dgc_params() const { return {lambda, zeta, mu, cooling(), convergence(), frame()}; }

StressParams RunConfig::stress_params() const { return {L, min_stress_ratio, max_iters, frame()}; }

SessionConfig RunConfig::session_config() const {
  SessionConfig s;
  s.learn = {alpha, gamma, epsilon, cooling(), metropolis, kappa, shared_q};
  s.convergence = convergence();
  s.frame = frame();
  return s;
}

RewardSpec RunConfig::reward_for(Algorithm a) const {
  switch (a) {
    case Algorithm::marl_fr: return FrForceReward{k};
    case Algorithm::marl_dgc: return DgcForceReward{lambda, zeta, mu};
    case Algorithm::marl_local_stress: return LocalStressReward{p_hops, L};
    case Algorithm::marl_global_stress: return GlobalStressReward{L};
    case Algorithm::marl_hybrid: return HybridReward{beta, k, p_hops, L};
    case Algorithm::marl_custom: return CustomReward{weights, L, node_radius};
    default: throw std::invalid_argument(std::string(to_string(a)) + " has no reward");
  }
}

MetricsParams RunConfig::metrics_params() const { return {node_radius, std::nullopt}; }

LayoutRun run_algorithm(const Graph& g, Algorithm a, const RunConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  LayoutRun out;
  auto finish = [&](ClassicResult r) {
    out.layout = std::move(r.layout);
    out.iterations = r.iterations;
    out.reason = r.reason;
  };
  switch (a) {
    case Algorithm::fr: finish(fr_layout(g, cfg.fr_params(), seed)); break;
    case Algorithm::dgc: finish(dgc_layout(g, cfg.dgc_params(), seed)); break;
    case Algorithm::sm:
      finish(stress_majorize(g, cfg.stress_params(), all_pairs_hop_distance(g), seed));
      break;
    default: {
      Session session(g, cfg.reward_for(a), cfg.session_config(), seed);
      RunResult r = session.run_until_converged();
      out.layout = std::move(r.layout);
      out.iterations = r.iterations;
      out.reason = r.reason;
    }
  }
  out.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

json Aggregate::to_json() const {
  auto s = [](const Stat& st) { return json{{"mean", st.mean}, {"std", st.stddev}}; };
  return {{"graph", graph},         {"algorithm", algorithm}, {"base_seed", base_seed},
          {"runs", runs},           {"nc", s(nc)},            {"no", s(no)},
          {"ne", s(ne)},            {"na", s(na)},            {"iterations", s(iterations)},
          {"runtime_ms", s(runtime_ms)}};
}

Aggregate aggregate(std::vector<MetricsReport> trials, std::string graph, std::string algorithm) {
  std::sort(trials.begin(), trials.end(),
            [](const MetricsReport& a, const MetricsReport& b) { return a.seed < b.seed; });
  Aggregate agg;
  agg.graph = std::move(graph);
  agg.algorithm = std::move(algorithm);
  agg.runs = trials.size();
  agg.base_seed = trials.empty() ? 0 : trials.front().seed;
  auto column = [&](auto get) {
    std::vector<double> xs;
    xs.reserve(trials.size());
    for (const auto& t : trials) xs.push_back(get(t));
    return stat_of(xs);
  };
  agg.nc = column([](const MetricsReport& r) { return r.nc; });
  agg.no = column([](const MetricsReport& r) { return r.no; });
  agg.ne = column([](const MetricsReport& r) { return r.ne; });
  agg.na = column([](const MetricsReport& r) { return r.na; });
  agg.iterations = column([](const MetricsReport& r) { return static_cast<double>(r.iterations); });
  agg.runtime_ms = column([](const MetricsReport& r) { return r.runtime_ms; });
  agg.trials = std::move(trials);
  return agg;
}

Aggregate run_trials(const TrialPlan& plan) {
  if (plan.graph == nullptr) throw std::invalid_argument("trial plan has no graph");
  if (plan.n_runs == 0) throw std::invalid_argument("n_runs must be at least 1");
  plan.config.validate();

  std::vector<MetricsReport> reports(plan.n_runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < plan.n_runs; i = next++) {
      try {
        const std::uint64_t seed = plan.base_seed + i;
        LayoutRun run = run_algorithm(*plan.graph, plan.algorithm, plan.config, seed);
        MetricsReport r = report(run.layout, *plan.graph, plan.config.metrics_params());
        r.graph = plan.graph_name;
        r.algorithm = std::string(to_string(plan.algorithm));
        r.seed = seed;
        r.iterations = run.iterations;
        r.runtime_ms = run.runtime_ms;
        reports[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(plan.jobs, 1, plan.n_runs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(std::move(reports), plan.graph_name, std::string(to_string(plan.algorithm)));
}

json RatioRow::to_json() const {
  auto cell = [](double v, bool flag) {
    json j{{"ratio", std::isfinite(v) ? json(v) : json(nullptr)}};
    if (flag) j["flag"] = "zero_denominator";
    return j;
  };
  return {{"nc", cell(nc, nc_flag)}, {"no", cell(no, no_flag)}, {"ne", cell(ne, ne_flag)},
          {"na", cell(na, na_flag)}, {"runtime", cell(runtime, runtime_flag)}};
}

RatioRow ratio_table(const Aggregate& marl, const Aggregate& classic) {
  RatioRow r;
  r.nc = ratio(marl.nc.mean, classic.nc.mean, r.nc_flag);
  r.no = ratio(marl.no.mean, classic.no.mean, r.no_flag);
  r.ne = ratio(marl.ne.mean, classic.ne.mean, r.ne_flag);
  r.na = ratio(marl.na.mean, classic.na.mean, r.na_flag);
  r.runtime = ratio(marl.runtime_ms.mean, classic.runtime_ms.mean, r.runtime_flag);
  return r;
}

std::string csv_header() {
  return "graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms,runs,nc_std,no_std,ne_std,na_std";
}

void export_csv(std::ostream& out, const std::vector<Aggregate>& rows) {
  out << csv_header() << '\n';
  for (const auto& a : rows) {
    out << a.graph << ',' << a.algorithm << ',' << a.base_seed << ',' << format_double(a.nc.mean) << ','
        << format_double(a.no.mean) << ',' << format_double(a.ne.mean) << ','
        << format_double(a.na.mean) << ',' << format_double(a.iterations.mean) << ','
        << format_double(a.runtime_ms.mean) << ',' << a.runs << ',' << format_double(a.nc.stddev)
        << ',' << format_double(a.no.stddev) << ',' << format_double(a.ne.stddev) << ','
        << format_double(a.na.stddev) << '\n';
  }
}

std::vector<Aggregate> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV is empty");
  if (line != csv_header()) throw std::invalid_argument("unexpected CSV header");
  std::vector<Aggregate> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 14) throw ParseError("expected 14 CSV columns", line_no);
    auto num = [&](std::size_t i) {
      std::istringstream s(cells[i]);
      s.imbue(std::locale::classic());
      double v = 0.0;
      if (!(s >> v)) throw ParseError("bad number '" + cells[i] + "'", line_no);
      return v;
    };
    Aggregate a;
    a.graph = cells[0];
    a.algorithm = cells[1];
    a.base_seed = static_cast<std::uint64_t>(std::stoull(cells[2]));
    a.nc.mean = num(3);
    a.no.mean = num(4);
    a.ne.mean = num(5);
    a.na.mean = num(6);
    a.iterations.mean = num(7);
    a.runtime_ms.mean = num(8);
    a.runs = static_cast<std::size_t>(std::stoull(cells[9]));
    a.nc.stddev = num(10);
    a.no.stddev = num(11);
    a.ne.stddev = num(12);
    a.na.stddev = num(13);
    rows.push_back(std::move(a));
  }
  return rows;
}

json summary_json(const std::vector<Aggregate>& rows) {
  json graphs = json::object();
  json ratios = json::object();
  std::map<std::pair<std::string, std::string>, const Aggregate*> index;
  for (const auto& a : rows) {
    graphs[a.graph][a.algorithm] = a.to_json();
    index[{a.graph, a.algorithm}] = &a;
  }
  for (const auto& a : rows) {
    Algorithm alg;
    try {
      alg = parse_algorithm(a.algorithm);
    } catch (const UnknownAlgorithmError&) {
      continue;
    }
    const auto base = classic_counterpart(alg);
    if (!base) continue;
    const auto it = index.find({a.graph, std::string(to_string(*base))});
    if (it == index.end()) continue;
    json row = ratio_table(a, *it->second).to_json();
    row["versus"] = to_string(*base);
    ratios[a.graph][a.algorithm] = row;
  }
  return {{"graphs", graphs}, {"ratios", ratios}};
}

}  // namespace marll
