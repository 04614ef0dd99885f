#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "marll/classic.hpp"
#include "marll/corpus.hpp"
#include "marll/forces.hpp"
#include "support/oracles.hpp"

using namespace marll;

namespace {

// Plain explicit integration of a pairwise force model with a tiny step,
// run long enough to settle. Returns final positions.
using PairForce = std::function<double(double d, bool adjacent)>;  // > 0 pulls together

std::vector<Vec2> reference_simulation(const Graph& g, std::vector<Vec2> p, const PairForce& force,
                                       double step = 1e-3, int iterations = 200000) {
  const std::size_t n = p.size();
  for (int it = 0; it < iterations; ++it) {
    std::vector<Vec2> f(n);
    for (NodeId v = 0; v < n; ++v) {
      for (NodeId u = 0; u < n; ++u) {
        if (u == v) continue;
        const double dx = p[u].x - p[v].x, dy = p[u].y - p[v].y;
        const double d = std::hypot(dx, dy);
        const double pull = force(d, g.has_edge(u, v));
        f[v].x += pull * dx / d;
        f[v].y += pull * dy / d;
      }
    }
    for (NodeId v = 0; v < n; ++v) p[v] += f[v] * step;
  }
  return p;
}

double fr_pair(double d, bool adjacent, double k) { return (adjacent ? d * d / k : 0.0) - k * k / d; }

double dgc_pair(double d, bool adjacent) {
  const double spring = adjacent ? (d > 30 ? 1 : -1) * (30 - d) * (30 - d) / 5 : 0.0;
  return spring - 5000 / (d * d);
}

}  // namespace

TEST(FrLayout, TwoNodesSettleAtK) {
  const Graph g = path_graph(2);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = fr_layout(g, FrParams{}, seed);
    if (std::abs(distance(r.layout[0], r.layout[1]) - 30.0) <= 3.0) ++good;
  }
  EXPECT_GE(good, 19);
}

TEST(FrLayout, SingleNodeKeepsItsInitialPosition) {
  const Graph g = path_graph(1);
  const auto r = fr_layout(g, FrParams{}, 42);
  Rng rng(42);
  const Layout init = random_layout(1, FrParams{}.frame, rng);
  EXPECT_EQ(r.layout[0], init[0]);
}

TEST(FrLayout, TriangleIsEquilateralLikeTheReference) {
  const Graph g = complete_graph(3);
  const auto ref = reference_simulation(g, {{0, 0}, {50, 5}, {20, 40}},
                                        [](double d, bool adj) { return fr_pair(d, adj, 30.0); });
  const double ref_side = distance(ref[0], ref[1]);
  EXPECT_NEAR(ref_side, 30.0, 0.01);  // the equilibrium side is k

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = fr_layout(g, FrParams{}, seed);
    const double a = distance(r.layout[0], r.layout[1]);
    const double b = distance(r.layout[1], r.layout[2]);
    const double c = distance(r.layout[0], r.layout[2]);
    const double mean = (a + b + c) / 3;
    for (double side : {a, b, c}) {
      EXPECT_NEAR(side, mean, 0.05 * mean);
      EXPECT_NEAR(side, ref_side, 0.05 * ref_side);
    }
  }
}

TEST(ForceLaws, DgcHandValues) {
  const DgcForceLaw law{30, 5, 5000};
  EXPECT_DOUBLE_EQ(law.attraction(30), 0.0);
  EXPECT_DOUBLE_EQ(std::abs(law.attraction(10)), 80.0);
  EXPECT_LT(law.attraction(10), 0.0);  // shorter than λ pushes apart
  EXPECT_GT(law.attraction(40), 0.0);
  EXPECT_DOUBLE_EQ(law.repulsion(10), 50.0);
  const FrForceLaw fr{30};
  EXPECT_DOUBLE_EQ(fr.attraction(30), fr.repulsion(30));
}

TEST(ForceLaws, CoincidentNodesThrow) {
  const Layout l(std::vector<Vec2>{{1, 1}, {1, 1}});
  EXPECT_THROW(net_force(0, l, path_graph(2), FrForceLaw{}), CoincidentNodesError);
}

TEST(DgcLayout, StarLeavesEquidistantLikeTheReference) {
  const Graph g = star_graph(4);
  const auto ref = reference_simulation(g, {{0, 0}, {40, 3}, {-5, 50}, {-45, -2}, {4, -38}}, dgc_pair, 1e-3,
                                        100000);
  const double ref_leg = distance(ref[0], ref[1]);
  for (NodeId leaf = 2; leaf <= 4; ++leaf) EXPECT_NEAR(distance(ref[0], ref[leaf]), ref_leg, 1e-3 * ref_leg);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = dgc_layout(g, DgcParams{}, seed);
    double mean = 0;
    for (NodeId leaf = 1; leaf <= 4; ++leaf) mean += distance(r.layout[0], r.layout[leaf]) / 4;
    for (NodeId leaf = 1; leaf <= 4; ++leaf) {
      EXPECT_NEAR(distance(r.layout[0], r.layout[leaf]), mean, 0.05 * mean) << "seed " << seed;
    }
    EXPECT_NEAR(mean, ref_leg, 0.05 * ref_leg) << "seed " << seed;
  }
}

TEST(ForceLayouts, StepNeverExceedsTemperature) {
  std::mt19937_64 rng(8);
  const Graph g = oracle::random_graph(25, 0.15, rng);
  FrParams fp;
  fr_layout(g, fp, 3, [](const IterationInfo& info, const Layout&) {
    ASSERT_LE(info.max_step, info.temperature * (1 + 1e-12));
  });
  dgc_layout(g, DgcParams{}, 3, [](const IterationInfo& info, const Layout&) {
    ASSERT_LE(info.max_step, info.temperature * (1 + 1e-12));
  });
}

TEST(ForceLayouts, TemperatureFollowsTheSchedule) {
  const Graph g = path_graph(4);
  FrParams fp;
  fp.cooling.period = 7;
  fp.convergence.max_iters = 60;
  fr_layout(g, fp, 1, [](const IterationInfo& info, const Layout&) {
    EXPECT_DOUBLE_EQ(info.temperature, 10.0 * std::pow(0.75, static_cast<double>((info.iteration - 1) / 7)));
  });
}

TEST(ForceLayouts, SeedDeterminism) {
  const Graph g = builtin_graph("karate");
  EXPECT_EQ(fr_layout(g, FrParams{}, 9).layout, fr_layout(g, FrParams{}, 9).layout);
  EXPECT_EQ(dgc_layout(g, DgcParams{}, 9).layout, dgc_layout(g, DgcParams{}, 9).layout);
  EXPECT_NE(fr_layout(g, FrParams{}, 9).layout, fr_layout(g, FrParams{}, 10).layout);
}

TEST(ForceLayouts, CoincidentStartIsSeparated) {
  const Graph g = path_graph(3);
  const Layout start(std::vector<Vec2>{{5, 5}, {5, 5}, {5, 5}});
  const auto r = fr_layout_from(g, FrParams{}, start, 1);
  EXPECT_TRUE(r.layout.all_finite());
  EXPECT_GT(distance(r.layout[0], r.layout[1]), 1.0);
}

TEST(ForceLayouts, InvalidParameters) {
  FrParams fp;
  fp.k = 0;
  EXPECT_THROW(fr_layout(path_graph(2), fp, 1), std::invalid_argument);
  FrParams cool;
  cool.cooling.factor = 1.0;
  EXPECT_THROW(fr_layout(path_graph(2), cool, 1), std::invalid_argument);
  DgcParams dp;
  dp.elastic = -1;
  EXPECT_THROW(dgc_layout(path_graph(2), dp, 1), std::invalid_argument);
  EXPECT_THROW(fr_layout(Graph{}, FrParams{}, 1), std::invalid_argument);
}

TEST(TotalStress, HandEvaluatedPath) {
  const Graph g = path_graph(3);
  const auto d = all_pairs_hop_distance(g);
  const Layout l(std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}});
  const double expected = (std::sqrt(2.0) - 2.0) * (std::sqrt(2.0) - 2.0) / 4.0;
  EXPECT_NEAR(total_stress(l, d), expected, 1e-15);
  EXPECT_NEAR(expected, 0.0857864, 1e-7);
}

TEST(TotalStress, ExactEmbeddingIsZeroAndScalingRaisesIt) {
  const Graph g = path_graph(4);
  const auto d = all_pairs_hop_distance(g);
  const Layout l(std::vector<Vec2>{{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  EXPECT_EQ(total_stress(l, d), 0.0);
  for (double s : {0.5, 0.9, 1.1, 3.0}) EXPECT_GT(total_stress(rotated_scaled(l, 0.0, s), d), 0.0);
  EXPECT_EQ(total_stress(rotated_scaled(l, 0.0, 30.0), d, 30.0), 0.0);
}

TEST(TotalStress, DisconnectedPairsAreIgnored) {
  const Graph g = Graph::from_edges(4, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {2, 3}});
  const auto d = all_pairs_hop_distance(g);
  const Layout l(std::vector<Vec2>{{0, 0}, {1, 0}, {500, 0}, {501, 0}});
  EXPECT_EQ(total_stress(l, d), 0.0);
}

TEST(TotalStress, TranslationInvariantExactly) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> eighths(0, 8 * 64);
  std::uniform_int_distribution<int> offset(-1000, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const Graph g = oracle::random_graph(n, 0.3, rng);
    const auto d = all_pairs_hop_distance(g);
    Layout l;
    for (std::size_t i = 0; i < n; ++i) l.positions.push_back({eighths(rng) / 8.0, eighths(rng) / 8.0});
    const Vec2 shift{static_cast<double>(offset(rng)), static_cast<double>(offset(rng))};
    EXPECT_EQ(total_stress(translated(l, shift), d, 30.0), total_stress(l, d, 30.0));
  }
}

TEST(TotalStress, MatchesOracleFormula) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = oracle::random_graph(3 + trial % 12, 0.3, rng);
    const Layout l = oracle::random_positions(g.node_count(), rng);
    const auto ref = oracle::stress(l, oracle::floyd_warshall(g), 30.0);
    EXPECT_NEAR(total_stress(l, all_pairs_hop_distance(g), 30.0), ref, 1e-9 * (1 + ref));
  }
}

TEST(StressMajorize, PathReachesZeroStress) {
  const Graph g = path_graph(3);
  StressParams p;
  p.edge_length = 1.0;
  const auto d = all_pairs_hop_distance(g);
  const auto r = stress_majorize(g, p, d, 5);
  EXPECT_LT(total_stress(r.layout, d), 1e-4);
}

TEST(StressMajorize, ExactLayoutDoesNotMove) {
  const Graph g = path_graph(3);
  StressParams p;
  p.edge_length = 1.0;
  const auto d = all_pairs_hop_distance(g);
  const Layout exact(std::vector<Vec2>{{0, 0}, {1, 0}, {2, 0}});
  const auto r = stress_majorize_from(g, p, d, exact, 1);
  EXPECT_EQ(r.layout, exact);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(total_stress(r.layout, d), 0.0);
}

TEST(StressMajorize, TriangleBecomesEquilateral) {
  const Graph g = complete_graph(3);
  StressParams p;
  p.edge_length = 1.0;
  p.tolerance = 1e-12;
  const auto d = all_pairs_hop_distance(g);
  const auto r = stress_majorize(g, p, d, 2);
  // The equilateral unit triangle has zero stress.
  EXPECT_NEAR(total_stress(r.layout, d), 0.0, 1e-3);
}

TEST(StressMajorize, StressNeverIncreasesBetweenSweeps) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(5 + trial, 0.2, rng);
    const auto d = all_pairs_hop_distance(g);
    double previous = std::numeric_limits<double>::infinity();
    stress_majorize(g, StressParams{}, d, trial, [&](const IterationInfo& info, const Layout& l) {
      ASSERT_LE(info.energy, previous);
      ASSERT_EQ(info.energy, total_stress(l, d, 30.0));
      previous = info.energy;
    });
  }
}

TEST(StressMajorize, SeedDeterminism) {
  const Graph g = builtin_graph("g2");
  const auto d = all_pairs_hop_distance(g);
  EXPECT_EQ(stress_majorize(g, StressParams{}, d, 3).layout, stress_majorize(g, StressParams{}, d, 3).layout);
}
