#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "marll/graph.hpp"
#include "marll/layout.hpp"

namespace marll {

enum class RewardKind { fr_force, dgc_force, local_stress, global_stress, custom, hybrid };

std::string_view to_string(RewardKind kind);
std::optional<RewardKind> parse_reward_kind(std::string_view text);

struct FrForceReward {
  double k = 30.0;
};

struct DgcForceReward {
  double ideal_length = 30.0;
  double elastic = 5.0;
  double repulsion_constant = 5000.0;
};

struct LocalStressReward {
  std::uint32_t p_hops = 10;
  double edge_length = 30.0;  // px per hop
};

struct GlobalStressReward {
  double edge_length = 30.0;
};

/// ω1..ω5 in the order overlap, crossing, spacing, edge length, angle.
struct CustomWeights {
  double overlap = 0.35;
  double crossing = 0.20;
  double spacing = 0.10;
  double edge_length = 0.25;
  double angle = 0.10;

  friend bool operator==(const CustomWeights&, const CustomWeights&) = default;
};

struct CustomReward {
  CustomWeights weights;
  double desired_length = 30.0;  // L: desired edge length and minimum node spacing, px
  double node_radius = 10.0;     // nodes overlap when closer than twice this
};

/// β·F(fr force) + (1-β)·E(local stress).
struct HybridReward {
  double beta = 0.5;
  double k = 30.0;
  std::uint32_t p_hops = 10;
  double edge_length = 30.0;
};

using RewardSpec = std::variant<FrForceReward, DgcForceReward, LocalStressReward,
                                GlobalStressReward, CustomReward, HybridReward>;

RewardKind kind_of(const RewardSpec& spec);
RewardSpec default_reward(RewardKind kind);

/// Throws std::invalid_argument when a parameter is out of range.
void validate(const RewardSpec& spec);

/// {"kind": "...", <kind-specific fields>}. from_json fills omitted fields
/// with defaults and rejects fields the kind does not use.
nlohmann::json to_json(const RewardSpec& spec);
RewardSpec reward_from_json(const nlohmann::json& doc);

/// Norm of the vector sum of attractive forces from v's neighbours and
/// repulsive forces from every other node. Throws CoincidentNodesError when
/// a node shares v's position.
double fr_force_magnitude(NodeId v, const Layout& l, const Graph& g, double k);
double dgc_force_magnitude(NodeId v, const Layout& l, const Graph& g, double ideal_length,
                           double elastic, double repulsion_constant);

/// Σ over u within p hops of v of d'^-2 (|p_u - p_v| - edge_length·d')^2.
double local_stress(NodeId v, const Layout& l, const DistanceMatrix& d, std::uint32_t p_hops,
                    double edge_length = 1.0);

/// The total stress of the layout; the same value for every agent.
double global_stress_for_agent(NodeId v, const Layout& l, const DistanceMatrix& d,
                               double edge_length = 1.0);

/// The terms of the total stress that involve v. Moving only v changes the
/// total by exactly the change in this sum.
double stress_terms_of(NodeId v, const Layout& l, const DistanceMatrix& d, double edge_length = 1.0);

struct QualityComponents {
  double overlaps = 0.0;    // φ^v: nodes closer than 2r to v
  double crossings = 0.0;   // χ^v: (incident edge, edge) pairs crossing in their interior
  double spacing = 0.0;     // η^v: Σ max(0, L - d(u, v)) over u ≠ v
  double edge_length = 0.0; // σ^v: mean ((|e| - L) / L)^2 over incident edges
  double angle = 0.0;       // Δ^v: Σ (ψ_k - 2π/deg)^2 over angular gaps, radians

  double weighted(const CustomWeights& w) const;
};

QualityComponents local_quality_components(NodeId v, const Layout& l, const Graph& g,
                                           const CustomReward& spec);
double local_quality(NodeId v, const Layout& l, const Graph& g, const CustomReward& spec);

/// β·F + (1-β)·E.
inline double hybrid_mix(double beta, double force, double stress) {
  return beta * force + (1.0 - beta) * stress;
}

struct Objective {
  double value = 0.0;
  RewardKind kind = RewardKind::fr_force;
};

/// F^v, E^v or Q^v for agent v; lower is better. `d` may be null for the
/// force and custom kinds.
Objective evaluate_objective(const RewardSpec& spec, NodeId v, const Layout& l, const Graph& g,
                             const DistanceMatrix* d);

bool needs_distances(const RewardSpec& spec);

}  // namespace marll
