#include "marll/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "marll/forces.hpp"

namespace marll {

using nlohmann::json;

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::fr_force: return "fr_force";
    case RewardKind::dgc_force: return "dgc_force";
    case RewardKind::local_stress: return "local_stress";
    case RewardKind::global_stress: return "global_stress";
    case RewardKind::custom: return "custom";
    case RewardKind::hybrid: return "hybrid";
  }
  return "unknown";
}

std::optional<RewardKind> parse_reward_kind(std::string_view text) {
  for (auto k : {RewardKind::fr_force, RewardKind::dgc_force, RewardKind::local_stress,
                 RewardKind::global_stress, RewardKind::custom, RewardKind::hybrid}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

RewardKind kind_of(const RewardSpec& spec) { return static_cast<RewardKind>(spec.index()); }

RewardSpec default_reward(RewardKind kind) {
  switch (kind) {
    case RewardKind::fr_force: return FrForceReward{};
    case RewardKind::dgc_force: return DgcForceReward{};
    case RewardKind::local_stress: return LocalStressReward{};
    case RewardKind::global_stress: return GlobalStressReward{};
    case RewardKind::custom: return CustomReward{};
    case RewardKind::hybrid: return HybridReward{};
  }
  throw std::invalid_argument("unknown reward kind");
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be a positive finite number");
  }
}

struct Validator {
  void operator()(const FrForceReward& r) const { require_positive(r.k, "k"); }
  void operator()(const DgcForceReward& r) const {
    require_positive(r.ideal_length, "ideal_length");
    require_positive(r.elastic, "elastic");
    require_positive(r.repulsion_constant, "repulsion_constant");
  }
  void operator()(const LocalStressReward& r) const {
    if (r.p_hops < 1) throw std::invalid_argument("p_hops must be at least 1");
    require_positive(r.edge_length, "edge_length");
  }
  void operator()(const GlobalStressReward& r) const { require_positive(r.edge_length, "edge_length"); }
  void operator()(const CustomReward& r) const {
    const auto& w = r.weights;
    const double parts[] = {w.overlap, w.crossing, w.spacing, w.edge_length, w.angle};
    double sum = 0.0;
    for (double x : parts) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("weights must be non-negative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to 1");
    require_positive(r.desired_length, "desired_length");
    require_positive(r.node_radius, "node_radius");
  }
  void operator()(const HybridReward& r) const {
    if (!(r.beta >= 0.0 && r.beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
    require_positive(r.k, "k");
    if (r.p_hops < 1) throw std::invalid_argument("p_hops must be at least 1");
    require_positive(r.edge_length, "edge_length");
  }
};

json weights_json(const CustomWeights& w) {
  return json::array({w.overlap, w.crossing, w.spacing, w.edge_length, w.angle});
}

CustomWeights weights_from_json(const json& a) {
  if (!a.is_array() || a.size() != 5) throw std::invalid_argument("weights must be an array of 5 numbers");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>(),
          a[4].get<double>()};
}

template <class T>
void take(const json& doc, const char* key, T& out) {
  if (auto it = doc.find(key); it != doc.end()) out = it->get<T>();
}

}  // namespace

void validate(const RewardSpec& spec) { std::visit(Validator{}, spec); }

json to_json(const RewardSpec& spec) {
  json out{{"kind", std::string(to_string(kind_of(spec)))}};
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FrForceReward>) {
          out["k"] = r.k;
        } else if constexpr (std::is_same_v<T, DgcForceReward>) {
          out["ideal_length"] = r.ideal_length;
          out["elastic"] = r.elastic;
          out["repulsion_constant"] = r.repulsion_constant;
        } else if constexpr (std::is_same_v<T, LocalStressReward>) {
          out["p_hops"] = r.p_hops;
          out["edge_length"] = r.edge_length;
        } else if constexpr (std::is_same_v<T, GlobalStressReward>) {
          out["edge_length"] = r.edge_length;
        } else if constexpr (std::is_same_v<T, CustomReward>) {
          out["weights"] = weights_json(r.weights);
          out["desired_length"] = r.desired_length;
          out["node_radius"] = r.node_radius;
        } else {
          out["beta"] = r.beta;
          out["k"] = r.k;
          out["p_hops"] = r.p_hops;
          out["edge_length"] = r.edge_length;
        }
      },
      spec);
  return out;
}

RewardSpec reward_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("reward spec must be an object");
  const auto kind_it = doc.find("kind");
  if (kind_it == doc.end() || !kind_it->is_string()) throw std::invalid_argument("reward spec needs a kind");
  const auto kind = parse_reward_kind(kind_it->get<std::string>());
  if (!kind) throw std::invalid_argument("unknown reward kind '" + kind_it->get<std::string>() + "'");

  RewardSpec spec = default_reward(*kind);
  const json allowed = to_json(spec);
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("field '" + key + "' does not apply to reward kind " +
                                  std::string(to_string(*kind)));
    }
  }
  try {
    std::visit(
        [&](auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, FrForceReward>) {
            take(doc, "k", r.k);
          } else if constexpr (std::is_same_v<T, DgcForceReward>) {
            take(doc, "ideal_length", r.ideal_length);
            take(doc, "elastic", r.elastic);
            take(doc, "repulsion_constant", r.repulsion_constant);
          } else if constexpr (std::is_same_v<T, LocalStressReward>) {
            take(doc, "p_hops", r.p_hops);
            take(doc, "edge_length", r.edge_length);
          } else if constexpr (std::is_same_v<T, GlobalStressReward>) {
            take(doc, "edge_length", r.edge_length);
          } else if constexpr (std::is_same_v<T, CustomReward>) {
            if (doc.contains("weights")) r.weights = weights_from_json(doc["weights"]);
            take(doc, "desired_length", r.desired_length);
            take(doc, "node_radius", r.node_radius);
          } else {
            take(doc, "beta", r.beta);
            take(doc, "k", r.k);
            take(doc, "p_hops", r.p_hops);
            take(doc, "edge_length", r.edge_length);
          }
        },
        spec);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad reward field: ") + e.what());
  }
  validate(spec);
  return spec;
}

double fr_force_magnitude(NodeId v, const Layout& l, const Graph& g, double k) {
  return norm(net_force(v, l, g, FrForceLaw{k}));
}

double dgc_force_magnitude(NodeId v, const Layout& l, const Graph& g, double ideal_length,
                           double elastic, double repulsion_constant) {
  return norm(net_force(v, l, g, DgcForceLaw{ideal_length, elastic, repulsion_constant}));
}

double local_stress(NodeId v, const Layout& l, const DistanceMatrix& d, std::uint32_t p_hops,
                    double edge_length) {
  double sum = 0.0;
  for (NodeId u = 0; u < d.size(); ++u) {
    const auto hops = d(u, v);
    if (u == v || hops > p_hops) continue;  // kUnreachable is larger than any p
    const double h = static_cast<double>(hops);
    const double gap = distance(l[u], l[v]) - edge_length * h;
    sum += gap * gap / (h * h);
  }
  return sum;
}

double stress_terms_of(NodeId v, const Layout& l, const DistanceMatrix& d, double edge_length) {
  return local_stress(v, l, d, DistanceMatrix::kUnreachable - 1, edge_length);
}

double global_stress_for_agent(NodeId, const Layout& l, const DistanceMatrix& d, double edge_length) {
  double sum = 0.0;
  for (NodeId u = 0; u < d.size(); ++u) {
    for (NodeId w = u + 1; w < d.size(); ++w) {
      const auto hops = d(u, w);
      if (hops == DistanceMatrix::kUnreachable) continue;
      const double h = static_cast<double>(hops);
      const double gap = distance(l[u], l[w]) - edge_length * h;
      sum += gap * gap / (h * h);
    }
  }
  return sum;
}

double QualityComponents::weighted(const CustomWeights& w) const {
  return w.overlap * overlaps + w.crossing * crossings + w.spacing * spacing +
         w.edge_length * edge_length + w.angle * angle;
}

QualityComponents local_quality_components(NodeId v, const Layout& l, const Graph& g,
                                           const CustomReward& spec) {
  QualityComponents q;
  const Vec2 pv = l[v];
  const double overlap_distance = 2.0 * spec.node_radius;
  const double L = spec.desired_length;

  for (NodeId u = 0; u < l.size(); ++u) {
    if (u == v) continue;
    const double d = distance(pv, l[u]);
    if (d < overlap_distance) q.overlaps += 1.0;
    if (d < L) q.spacing += L - d;
  }

  const auto nbrs = g.neighbors(v);
  if (!nbrs.empty()) {
    double sum = 0.0;
    for (NodeId u : nbrs) {
      const double rel = (distance(pv, l[u]) - L) / L;
      sum += rel * rel;
    }
    q.edge_length = sum / static_cast<double>(nbrs.size());
  }

  if (nbrs.size() >= 2) {
    std::vector<double> angles;
    angles.reserve(nbrs.size());
    for (NodeId u : nbrs) angles.push_back(std::atan2(l[u].y - pv.y, l[u].x - pv.x));
    std::sort(angles.begin(), angles.end());
    const double ideal = 2.0 * std::numbers::pi / static_cast<double>(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const double gap = i + 1 < angles.size() ? angles[i + 1] - angles[i]
                                               : 2.0 * std::numbers::pi - (angles.back() - angles.front());
      q.angle += (gap - ideal) * (gap - ideal);
    }
  }

  for (NodeId u : nbrs) {
    for (const Edge& e : g.edges()) {
      if (segments_cross(pv, l[u], l[e.u], l[e.v]) && e.u != v && e.v != v && e.u != u && e.v != u) {
        q.crossings += 1.0;
      }
    }
  }
  return q;
}

double local_quality(NodeId v, const Layout& l, const Graph& g, const CustomReward& spec) {
  return local_quality_components(v, l, g, spec).weighted(spec.weights);
}

bool needs_distances(const RewardSpec& spec) {
  const auto k = kind_of(spec);
  return k == RewardKind::local_stress || k == RewardKind::global_stress || k == RewardKind::hybrid;
}

Objective evaluate_objective(const RewardSpec& spec, NodeId v, const Layout& l, const Graph& g,
                             const DistanceMatrix* d) {
  if (needs_distances(spec) && d == nullptr) {
    throw std::invalid_argument("stress objectives need a distance matrix");
  }
  const double value = std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FrForceReward>) {
          return fr_force_magnitude(v, l, g, r.k);
        } else if constexpr (std::is_same_v<T, DgcForceReward>) {
          return dgc_force_magnitude(v, l, g, r.ideal_length, r.elastic, r.repulsion_constant);
        } else if constexpr (std::is_same_v<T, LocalStressReward>) {
          return local_stress(v, l, *d, r.p_hops, r.edge_length);
        } else if constexpr (std::is_same_v<T, GlobalStressReward>) {
          return global_stress_for_agent(v, l, *d, r.edge_length);
        } else if constexpr (std::is_same_v<T, CustomReward>) {
          return local_quality(v, l, g, r);
        } else {
          // The degenerate mixes skip the unused term exactly.
          if (r.beta == 1.0) return fr_force_magnitude(v, l, g, r.k);
          if (r.beta == 0.0) return local_stress(v, l, *d, r.p_hops, r.edge_length);
          return hybrid_mix(r.beta, fr_force_magnitude(v, l, g, r.k),
                            local_stress(v, l, *d, r.p_hops, r.edge_length));
        }
      },
      spec);
  return {value, kind_of(spec)};
}

}  // namespace marll
