#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "marll/corpus.hpp"
#include "marll/engine.hpp"
#include "support/oracles.hpp"

using namespace marll;

namespace {

SessionConfig quiet(double epsilon = 0.1) {
  SessionConfig cfg;
  cfg.learn.epsilon = epsilon;
  return cfg;
}

}  // namespace

TEST(Actions, DirectionsAndCells) {
  EXPECT_EQ(direction(Action::stay), (Vec2{0, 0}));
  EXPECT_EQ(direction(Action::north), (Vec2{0, 1}));
  EXPECT_EQ(direction(Action::west), (Vec2{-1, 0}));
  for (Action a : kAllActions) {
    if (a != Action::stay) EXPECT_NEAR(norm(direction(a)), 1.0, 1e-15);
  }
  EXPECT_EQ(cell_of(Action::north_west), 0);
  EXPECT_EQ(cell_of(Action::north), 1);
  EXPECT_EQ(cell_of(Action::stay), kCenterState);
  EXPECT_EQ(cell_of(Action::south_east), 8);
}

TEST(SelectAction, GreedyPicksBestValue) {
  QTable q;
  q(3, Action::east) = 1.0;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(select_action(q, 3, 0.0, rng), Action::east);
}

TEST(SelectAction, AllZeroTableBreaksTiesTowardStay) {
  QTable q;
  Rng rng(2);
  EXPECT_EQ(select_action(q, kCenterState, 0.0, rng), Action::stay);
  EXPECT_EQ(q.argmax(0), Action::stay);
}

TEST(SelectAction, FullExplorationIsUniform) {
  QTable q;
  q(0, Action::south) = 100.0;
  Rng rng(3);
  constexpr int kDraws = 10000;
  std::array<int, kActionCount> counts{};
  for (int i = 0; i < kDraws; ++i) ++counts[static_cast<std::size_t>(select_action(q, 0, 1.0, rng))];
  const double expected = kDraws / 9.0;
  const double sigma = std::sqrt(kDraws * (1.0 / 9) * (8.0 / 9));
  for (int c : counts) EXPECT_NEAR(c, expected, 3 * sigma);
}

TEST(QUpdate, HandValues) {
  QTable q;
  q_update(q, 0, Action::north, 1, 5.0, 1.0, 0.0);
  EXPECT_EQ(q(0, Action::north), 5.0);

  QTable r;
  r(1, Action::east) = 0.0;
  q_update(r, 0, Action::south, 1, 1.0, 0.5, 0.9);
  EXPECT_EQ(r(0, Action::south), 0.5);

  QTable frozen;
  frozen(2, Action::west) = 3.0;
  const QTable before = frozen;
  q_update(frozen, 2, Action::west, 2, 50.0, 0.0, 0.5);
  EXPECT_EQ(frozen, before);
}

TEST(QUpdate, RejectsNonFiniteReward) {
  QTable q;
  EXPECT_THROW(q_update(q, 0, Action::stay, 0, std::nan(""), 0.3, 0.5), std::invalid_argument);
  EXPECT_THROW(q_update(q, 0, Action::stay, 0, INFINITY, 0.3, 0.5), std::invalid_argument);
}

TEST(QUpdate, StaysBoundedUnderBoundedRewards) {
  QTable q;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> cell(0, 8);
  std::uniform_real_distribution<double> reward(-10.0, 10.0);
  const double gamma = 0.5;
  const double bound = 10.0 / (1 - gamma);
  for (int i = 0; i < 100000; ++i) {
    q_update(q, cell(rng), kAllActions[static_cast<std::size_t>(cell(rng))], cell(rng), reward(rng), 0.3, gamma);
  }
  ASSERT_TRUE(q.all_finite());
  for (int s = 0; s < 9; ++s)
    for (Action a : kAllActions) EXPECT_LE(std::abs(q(s, a)), bound);
}

TEST(Session, InitIsDeterministic) {
  const Graph g = builtin_graph("karate");
  const Session a = init_session(g, FrForceReward{}, quiet(), 5);
  const Session b = init_session(g, FrForceReward{}, quiet(), 5);
  const Session c = init_session(g, FrForceReward{}, quiet(), 6);
  EXPECT_EQ(a.layout(), b.layout());
  EXPECT_NE(a.layout(), c.layout());
  EXPECT_EQ(a.layout().size(), 34u);
  for (NodeId v = 0; v < 34; ++v) EXPECT_EQ(a.state(v), kCenterState);
  EXPECT_EQ(a.q_table(), QTable{});
}

TEST(Session, SingleNodeStepsLeaveObjectiveUnchanged) {
  Session s(path_graph(1), FrForceReward{}, quiet(), 1);
  for (int i = 0; i < 50; ++i) {
    const auto r = s.step();
    ASSERT_EQ(r.moves.size(), 1u);
    EXPECT_EQ(r.moves[0].reward, 0.0);
    EXPECT_EQ(s.agent_objective(0), 0.0);
  }
  const auto result = s.run_until_converged();
  EXPECT_LE(result.iterations, 2500u);
}

TEST(Session, AllLockedLeavesLayoutUnchanged) {
  Session s(builtin_graph("karate"), FrForceReward{}, quiet(), 3);
  for (NodeId v = 0; v < 34; ++v) s.lock_node(v);
  const Layout before = s.layout();
  for (int i = 0; i < 20; ++i) {
    const auto r = s.step();
    EXPECT_EQ(r.mean_displacement, 0.0);
  }
  EXPECT_EQ(s.layout(), before);
  EXPECT_EQ(s.q_table(), QTable{});
}

TEST(Session, MovesHaveRealizedRewardsAndRejectionsRestorePositions) {
  Session s(path_graph(2), FrForceReward{}, quiet(0.5), 11, Layout({{0, 0}, {300, 0}}));
  bool saw_accepted_gain = false;
  bool saw_rejection = false;
  for (int i = 0; i < 200; ++i) {
    const Layout before = s.layout();
    const auto r = s.step();
    for (const auto& m : r.moves) {
      if (m.action != Action::stay && m.accepted && m.reward > 0) saw_accepted_gain = true;
      if (!m.accepted) {
        saw_rejection = true;
        EXPECT_EQ(m.reward, 0.0);
      }
    }
    // With two nodes the rejected agent is the only one that could move.
    if (!r.moves[0].accepted && !r.moves[1].accepted) {
      EXPECT_EQ(s.layout(), before);
    }
  }
  EXPECT_TRUE(saw_accepted_gain);
  EXPECT_TRUE(saw_rejection);
}

TEST(Session, RejectedMoveKeepsNodeBitwise) {
  SessionConfig cfg = quiet(1.0);
  cfg.learn.metropolis = false;
  Session s(path_graph(2), FrForceReward{}, cfg, 4, Layout({{0.1, 0.2}, {30.7, -0.3}}));
  int rejected = 0;
  for (int i = 0; i < 200; ++i) {
    const Layout before = s.layout();
    const auto r = s.step();
    if (!r.moves[0].accepted) {
      ++rejected;
      EXPECT_EQ(s.layout()[0], before[0]);
    }
  }
  EXPECT_GT(rejected, 0);
}

TEST(Session, LockedNodeStaysPut) {
  Session s(builtin_graph("karate"), FrForceReward{}, quiet(), 8);
  s.lock_node(0);
  const Vec2 pinned = s.layout()[0];
  for (int i = 0; i < 100; ++i) {
    const auto r = s.step();
    EXPECT_TRUE(r.moves[0].locked);
    ASSERT_EQ(s.layout()[0], pinned);
  }
  s.unlock_node(0);
  EXPECT_FALSE(s.is_locked(0));
  EXPECT_THROW(s.lock_node(34), std::out_of_range);
  EXPECT_THROW(s.unlock_node(100), std::out_of_range);
}

TEST(Session, LockAllButOne) {
  Session s(builtin_graph("karate"), FrForceReward{}, quiet(), 12);
  for (NodeId v = 1; v < 34; ++v) s.lock_node(v);
  const Layout before = s.layout();
  for (int i = 0; i < 50; ++i) s.step();
  for (NodeId v = 1; v < 34; ++v) ASSERT_EQ(s.layout()[v], before[v]);
  EXPECT_EQ(s.locked_nodes().size(), 33u);
}

TEST(Session, TemperatureFollowsSchedule) {
  Session s(path_graph(4), FrForceReward{}, quiet(), 2);
  const std::size_t P = s.cooling_period();
  EXPECT_EQ(P, 100u);
  for (std::size_t t = 0; t < 250; ++t) {
    const auto r = s.step();
    EXPECT_DOUBLE_EQ(r.temperature, 10.0 * std::pow(0.75, static_cast<double>(t / P)));
  }
}

TEST(Session, AcceptedDisplacementBoundedByTemperature) {
  Session s(builtin_graph("karate"), DgcForceReward{}, quiet(), 21);
  for (int i = 0; i < 150; ++i) {
    const Layout before = s.layout();
    const auto r = s.step();
    for (NodeId v = 0; v < 34; ++v) {
      EXPECT_LE(distance(before[v], s.layout()[v]), r.temperature + 2 * kCoincidenceJitter);
    }
  }
}

TEST(Session, GreedyStressRunNeverRaisesEnergy) {
  SessionConfig cfg = quiet(0.0);
  cfg.learn.metropolis = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Session s(builtin_graph("karate"), GlobalStressReward{}, cfg, seed);
    double e = s.energy();
    for (int i = 0; i < 60; ++i) {
      s.step();
      const double next = s.energy();
      ASSERT_LE(next, e * (1 + 1e-12)) << "seed " << seed << " step " << i;
      e = next;
    }
  }
}

TEST(Session, RunTerminatesWithinCap) {
  for (auto spec : {RewardSpec{FrForceReward{}}, RewardSpec{LocalStressReward{}}, RewardSpec{HybridReward{}}}) {
    Session s(builtin_graph("karate"), spec, quiet(), 4);
    const auto r = s.run_until_converged();
    EXPECT_LE(r.iterations, 2500u);
    EXPECT_EQ(r.iterations, s.iteration());
    EXPECT_TRUE(r.layout.all_finite());
  }
}

TEST(Session, TwoNodesSettleNearK) {
  int close = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Session s(path_graph(2), FrForceReward{}, quiet(), seed);
    const auto r = s.run_until_converged();
    const double d = distance(r.layout[0], r.layout[1]);
    if (std::abs(d - 30.0) <= 3.0) ++close;
  }
  EXPECT_GE(close, 19);
}

TEST(Session, ReplayIsBitwiseDeterministic) {
  Session a(builtin_graph("karate"), FrForceReward{}, quiet(), 99);
  Session b(builtin_graph("karate"), FrForceReward{}, quiet(), 99);
  for (int i = 0; i < 80; ++i) {
    a.step();
    b.step();
  }
  EXPECT_EQ(a.layout(), b.layout());
  EXPECT_EQ(a.q_table(), b.q_table());
}

TEST(Session, ResetRestoresInitialState) {
  Session s(builtin_graph("karate"), FrForceReward{}, quiet(), 7);
  const Layout start = s.layout();
  s.lock_node(2);
  for (int i = 0; i < 30; ++i) s.step();
  s.reset(true);
  EXPECT_EQ(s.iteration(), 0u);
  EXPECT_EQ(s.layout(), start);
  EXPECT_EQ(s.q_table(), QTable{});
  EXPECT_TRUE(s.is_locked(2));
}

TEST(Session, MoveNodePlacesExactly) {
  Session s(builtin_graph("karate"), FrForceReward{}, quiet(), 7);
  s.move_node(5, {123.25, -4.5});
  EXPECT_EQ(s.layout()[5], (Vec2{123.25, -4.5}));
  EXPECT_THROW(s.move_node(99, {0, 0}), std::out_of_range);
}

TEST(Session, PerAgentTablesWhenNotShared) {
  SessionConfig cfg = quiet();
  cfg.learn.shared_q = false;
  Session s(path_graph(3), FrForceReward{}, cfg, 1);
  for (int i = 0; i < 20; ++i) s.step();
  EXPECT_FALSE(s.q_table(0) == s.q_table(1) && s.q_table(1) == s.q_table(2));
}

TEST(Session, SnapshotFields) {
  Session s(path_graph(3), FrForceReward{}, quiet(), 1);
  s.step();
  const auto j = s.snapshot();
  for (const char* key : {"iteration", "temperature", "positions", "locked", "epsilon", "reward"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["iteration"], 1);
}

TEST(LearnConfig, Validation) {
  LearnConfig c;
  c.alpha = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.epsilon = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.kappa = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
