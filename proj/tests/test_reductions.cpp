#include <gtest/gtest.h>

#include "dmwis/reductions.hpp"
#include "fixtures.hpp"

namespace dmwis {
namespace {

using testing::make_graph;
using testing::make_state;

std::vector<Rank> all_on_zero(std::size_t n) { return std::vector<Rank>(n, 0); }

LocalId loc(const ReductionState& st, GlobalId v) { return st.lg.local(v); }

VertexState state_of(const ReductionState& st, GlobalId v) { return st.lg.state(st.lg.local(v)); }

// Weight of a maximum independent set of the live part of a single-PE state, plus its offset.
Weight alpha_after(const ReductionState& st, const GlobalGraph& g) {
  std::vector<GlobalId> live;
  for (auto v : st.lg.live_owned_vertices()) live.push_back(st.lg.global(v));
  std::sort(live.begin(), live.end());
  auto sub = induced_subgraph(g, live);
  std::vector<Weight> w;
  for (auto v : live) w.push_back(st.lg.weight(st.lg.local(v)));
  std::vector<Edge> edges;
  for (GlobalId u = 0; u < sub.n(); ++u) {
    for (auto x : sub.neighbors(u)) {
      if (u < x) edges.push_back({u, x});
    }
  }
  return st.offset + exact_alpha(build_global(edges, std::move(w)));
}

TEST(DegreeOne, HeavierPendantIsIncluded) {
  auto g = make_graph({5, 3}, {{0, 1}});
  auto st = make_state(g, all_on_zero(2), 0);
  ASSERT_TRUE(try_degree_one(st, 0));
  EXPECT_EQ(st.offset, 5u);
  EXPECT_EQ(state_of(st, 0), VertexState::included);
  EXPECT_EQ(state_of(st, 1), VertexState::excluded);
}

TEST(DegreeOne, LighterPendantIsFolded) {
  auto g = make_graph({2, 9}, {{0, 1}});
  auto st = make_state(g, all_on_zero(2), 0);
  ASSERT_TRUE(try_degree_one(st, 0));
  EXPECT_EQ(st.offset, 2u);
  EXPECT_EQ(st.lg.weight(loc(st, 1)), 7u);
  EXPECT_EQ(state_of(st, 0), VertexState::folded);
  EXPECT_EQ(alpha_after(st, g), 9u);
  ASSERT_EQ(st.events.size(), 1u);
  EXPECT_EQ(st.events[0].kind, EventKind::degree_one_fold);
  EXPECT_EQ(st.events[0].depends, std::vector<GlobalId>{1});
}

TEST(DegreeOne, PendantOnLighterGhostIsProposed) {
  auto g = make_graph({6, 4}, {{0, 1}});
  auto st = make_state(g, {0, 1}, 0);
  ASSERT_TRUE(try_degree_one(st, loc(st, 0)));
  EXPECT_EQ(state_of(st, 0), VertexState::proposed);
  EXPECT_EQ(st.lg.state(loc(st, 1)), VertexState::ghost_removed);
  ASSERT_EQ(st.pending_status.size(), 1u);
  EXPECT_EQ(st.pending_status[0].status.status, StatusKind::proposed);
  EXPECT_EQ(st.pending_status[0].recv, std::vector<Rank>{1});
}

TEST(DegreeOne, PendantOnHeavierGhostIsMoved) {
  auto g = make_graph({4, 10}, {{0, 1}});
  auto st = make_state(g, {0, 1}, 0);
  ASSERT_TRUE(try_degree_one(st, loc(st, 0)));
  EXPECT_EQ(state_of(st, 0), VertexState::moved_out);
  EXPECT_EQ(st.offset, 0u);
  ASSERT_EQ(st.pending_status.size(), 1u);
  const auto& s = st.pending_status[0];
  EXPECT_EQ(s.status.status, StatusKind::moved);
  EXPECT_EQ(s.status.neighbor, 1u);
  EXPECT_EQ(s.status.weight, 4u);
  EXPECT_EQ(s.recv, std::vector<Rank>{1});
  EXPECT_EQ(st.events.back().kind, EventKind::move);
  EXPECT_EQ(st.events.back().peer, 1u);
}

TEST(NeighborhoodRemoval, IsolatedVertexIsIncluded) {
  auto g = make_graph({1}, {});
  auto st = make_state(g, all_on_zero(1), 0);
  ASSERT_TRUE(try_neighborhood_removal(st, 0));
  EXPECT_EQ(st.offset, 1u);
}

TEST(NeighborhoodRemoval, EqualNeighborhoodWeightSuffices) {
  auto g = make_graph({10, 3, 3, 4}, {{0, 1}, {0, 2}, {0, 3}});
  auto st = make_state(g, all_on_zero(4), 0);
  ASSERT_TRUE(try_neighborhood_removal(st, 0));
  EXPECT_EQ(st.offset, 10u);
  for (GlobalId u : {1u, 2u, 3u}) EXPECT_EQ(state_of(st, u), VertexState::excluded);
}

TEST(NeighborhoodRemoval, LighterVertexIsKept) {
  auto g = make_graph({9, 3, 3, 4}, {{0, 1}, {0, 2}, {0, 3}});
  auto st = make_state(g, all_on_zero(4), 0);
  EXPECT_FALSE(try_neighborhood_removal(st, 0));
  EXPECT_TRUE(st.events.empty());
  EXPECT_LT(9u, exact_alpha(induced_subgraph(g, std::vector<GlobalId>{1, 2, 3})) + 0u);
}

TEST(HeavyVertex, ExampleIncludesV) {
  testing::HeavyVertexExample f;
  auto st = make_state(f.g, f.assignment, 0);
  const auto nb = st.lg.live_neighbors(loc(st, f.v));
  EXPECT_EQ(solve_exact_weight(st.neighborhood_subproblem(nb)), 10u);
  ASSERT_TRUE(try_heavy_vertex(st, loc(st, f.v)));
  EXPECT_EQ(st.offset, 10u);
  EXPECT_EQ(state_of(st, f.v), VertexState::proposed);
  EXPECT_EQ(state_of(st, f.d), VertexState::excluded);
  EXPECT_EQ(state_of(st, f.e), VertexState::excluded);
  EXPECT_EQ(st.lg.state(loc(st, f.a)), VertexState::ghost_removed);
  EXPECT_EQ(st.lg.state(loc(st, f.b)), VertexState::ghost_removed);
  EXPECT_TRUE(st.lg.live(loc(st, f.c)));
}

TEST(HeavyVertex, CliqueNeighborhood) {
  auto g = make_graph({4, 4, 4}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, all_on_zero(3), 0);
  ASSERT_TRUE(try_heavy_vertex(st, 0));
  EXPECT_EQ(st.offset, 4u);
}

TEST(HeavyVertex, CapExceededReturnsFalse) {
  std::vector<Edge> star;
  for (GlobalId u = 1; u <= 11; ++u) star.push_back({0, u});
  auto g = make_graph(std::vector<Weight>(12, 1), star);
  ReductionConfig cfg;
  cfg.max_subproblem = 10;
  auto st = make_state(g, all_on_zero(12), 0, cfg);
  st.lg.set_weight(0, 1000);
  EXPECT_FALSE(try_heavy_vertex(st, 0));
  cfg.max_subproblem = 11;
  auto st2 = make_state(g, all_on_zero(12), 0, cfg);
  st2.lg.set_weight(0, 1000);
  EXPECT_TRUE(try_heavy_vertex(st2, 0));
}

TEST(SimplicialVertex, HeaviestInTriangle) {
  auto g = make_graph({5, 4, 3}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, all_on_zero(3), 0);
  ASSERT_TRUE(try_simplicial_vertex(st, 0));
  EXPECT_EQ(st.offset, 5u);
}

TEST(SimplicialVertex, TiesAllowed) {
  auto g = make_graph({4, 4, 4}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, all_on_zero(3), 0);
  EXPECT_TRUE(try_simplicial_vertex(st, 0));
}

TEST(SimplicialVertex, NonCliqueNeighborhood) {
  // K4 minus the edge {2,3}; vertex 1 sees 0, 2, 3 which are not pairwise adjacent
  auto g = make_graph({1, 9, 1, 1}, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
  auto st = make_state(g, all_on_zero(4), 0);
  EXPECT_FALSE(try_simplicial_vertex(st, 1));
}

TEST(SimplicialVertex, AtMostOneGhostInClique) {
  auto g = make_graph({5, 4, 3}, {{0, 1}, {0, 2}, {1, 2}});
  auto one_ghost = make_state(g, {0, 0, 1}, 0);
  EXPECT_TRUE(try_simplicial_vertex(one_ghost, one_ghost.lg.local(0)));
  auto two_ghosts = make_state(g, {0, 1, 1}, 0);
  EXPECT_FALSE(try_simplicial_vertex(two_ghosts, two_ghosts.lg.local(0)));
}

TEST(SimplicialWeightTransfer, TriangleWithNonSimplicialHeavyNeighbor) {
  // triangle v(3), u1(5), u2(2); u1 has a further neighbour w(1), so it is not simplicial
  auto g = make_graph({3, 5, 2, 1}, {{0, 1}, {0, 2}, {1, 2}, {1, 3}});
  auto st = make_state(g, all_on_zero(4), 0);
  ASSERT_TRUE(try_simplicial_weight_transfer(st, 0));
  EXPECT_EQ(st.offset, 3u);
  EXPECT_EQ(st.lg.weight(1), 2u);
  EXPECT_EQ(state_of(st, 0), VertexState::folded);
  EXPECT_EQ(state_of(st, 2), VertexState::excluded);
  EXPECT_EQ(alpha_after(st, g), 5u);
}

TEST(SimplicialWeightTransfer, HeavierSimplicialNeighborBlocks) {
  // in a plain triangle the heavier u1 is simplicial itself
  auto g = make_graph({3, 5, 2}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, all_on_zero(3), 0);
  EXPECT_FALSE(try_simplicial_weight_transfer(st, 0));
  EXPECT_TRUE(try_simplicial_vertex(st, 1));
}

TEST(SimplicialWeightTransfer, GhostNeighborBlocks) {
  auto g = make_graph({3, 5, 2}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, {0, 0, 1}, 0);
  EXPECT_FALSE(try_simplicial_weight_transfer(st, st.lg.local(0)));
}

TEST(SimplicialWeightTransfer, HeaviestIsLeftToSimplicialVertex) {
  auto g = make_graph({5, 4, 3}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, all_on_zero(3), 0);
  EXPECT_FALSE(try_simplicial_weight_transfer(st, 0));
}

TEST(BasicSingleEdge, ExampleExcludesV) {
  testing::BasicSingleEdgeExample f;
  auto st = make_state(f.g, f.assignment, 0);
  ASSERT_TRUE(try_basic_single_edge(st, loc(st, f.v)));
  EXPECT_EQ(state_of(st, f.v), VertexState::excluded);
  EXPECT_EQ(st.offset, 0u);
  ASSERT_EQ(st.pending_status.size(), 1u);
  EXPECT_EQ(st.pending_status[0].status.status, StatusKind::excluded);
}

TEST(BasicSingleEdge, LighterUFails) {
  testing::BasicSingleEdgeExample f;
  auto g = make_graph({7, 8, 4, 7, 2}, {{f.a, f.v}, {f.a, f.u}, {f.b, f.u}, {f.v, f.u}, {f.v, f.d}, {f.u, f.d}});
  auto st = make_state(g, f.assignment, 0);
  EXPECT_FALSE(try_basic_single_edge(st, loc(st, f.v)));
}

TEST(BasicSingleEdge, PendantEdge) {
  auto g = make_graph({5, 5}, {{0, 1}});
  auto st = make_state(g, all_on_zero(2), 0);
  ASSERT_TRUE(try_basic_single_edge(st, 1));
  EXPECT_EQ(state_of(st, 1), VertexState::excluded);
}

TEST(ExtendedSingleEdge, ExampleExcludesCommonNeighbors) {
  testing::ExtendedSingleEdgeExample f;
  auto st = make_state(f.g, f.assignment, 0);
  ASSERT_TRUE(try_extended_single_edge(st, loc(st, f.v)));
  EXPECT_EQ(state_of(st, f.x1), VertexState::excluded);
  EXPECT_EQ(state_of(st, f.x2), VertexState::excluded);
  EXPECT_TRUE(st.lg.live(loc(st, f.v)));
  EXPECT_TRUE(st.lg.live(loc(st, f.u)));
  EXPECT_TRUE(st.lg.live(loc(st, f.a)));
  EXPECT_EQ(st.offset, 0u);
}

TEST(ExtendedSingleEdge, Triangle) {
  auto g = make_graph({5, 5, 1}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, all_on_zero(3), 0);
  ASSERT_TRUE(try_extended_single_edge(st, 0));
  EXPECT_EQ(state_of(st, 2), VertexState::excluded);
  EXPECT_EQ(alpha_after(st, g), exact_alpha(g));
}

TEST(ExtendedSingleEdge, OnlyGhostsInCommon) {
  auto g = make_graph({5, 5, 1}, {{0, 1}, {0, 2}, {1, 2}});
  auto st = make_state(g, {0, 0, 1}, 0);
  EXPECT_FALSE(try_extended_single_edge(st, st.lg.local(0)));
}

ReductionConfig meta_only() {
  ReductionConfig cfg;
  cfg.enabled.fill(false);
  cfg.enabled[static_cast<std::size_t>(Rule::meta)] = true;
  cfg.meta_rules = default_sequential_rules(10);
  return cfg;
}

TEST(MetaRule, InteriorDegreeOneIsDelegated) {
  auto g = make_graph({2, 9, 1, 1}, {{0, 1}, {1, 2}, {2, 3}});
  auto st = make_state(g, {0, 0, 0, 1}, 0, meta_only());
  ASSERT_TRUE(try_meta_rule(st, st.lg.local(0)));
  EXPECT_EQ(state_of(st, 0), VertexState::folded);
  EXPECT_EQ(st.lg.weight(st.lg.local(1)), 7u);
}

TEST(MetaRule, InterfaceVertexIsRefused) {
  auto g = make_graph({9, 1}, {{0, 1}});
  auto st = make_state(g, {0, 1}, 0, meta_only());
  EXPECT_FALSE(try_meta_rule(st, st.lg.local(0)));
  EXPECT_TRUE(st.events.empty());
}

TEST(MetaRule, ProbeNeverRecordsBorderVertexOnApplication) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = testing::random_graph(16, 0.15, seed);
    std::vector<Rank> assignment(16);
    for (GlobalId v = 0; v < 16; ++v) assignment[v] = v < 8 ? 0 : 1;
    auto st = make_state(g, assignment, 0, meta_only());
    for (auto v : st.lg.live_owned_vertices()) {
      if (!st.lg.live_owned(v)) continue;
      for (const auto& rule : st.config.meta_rules) {
        ReadProbe probe(st.lg);
        auto plan = rule.rule(probe, v);
        if (plan.kind == SequentialPlan::Kind::none || probe.touched_border()) continue;
        for (auto r : probe.reads()) {
          EXPECT_FALSE(st.lg.is_ghost(r));
          EXPECT_FALSE(st.lg.has_live_ghost_neighbor(r));
        }
      }
      try_meta_rule(st, v);
    }
    EXPECT_EQ(st.lg.audit().violations, 0u);
  }
}

TEST(LocalReduce, AlreadyReducedGraphDoesNothing) {
  auto g = make_graph({5, 5, 5, 5}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto st = make_state(g, all_on_zero(4), 0);
  EXPECT_FALSE(local_reduce(st));
  EXPECT_TRUE(st.events.empty());
}

TEST(LocalReduce, WeightedPathReducesCompletely) {
  auto g = make_graph({3, 7, 4, 6, 2}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto st = make_state(g, all_on_zero(5), 0);
  EXPECT_TRUE(local_reduce(st));
  EXPECT_EQ(st.lg.num_live_owned(), 0u);
  EXPECT_EQ(st.offset, exact_alpha(g));
}

TEST(LocalReduce, SingleEdgeExclusionReenablesDegreeOne) {
  // 4-cycle 0-1-2-3 plus chord {0,2}; after single-edge excludes a vertex, a pendant appears
  auto g = make_graph({6, 2, 5, 1}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  ReductionConfig cfg;
  cfg.enabled.fill(false);
  cfg.enabled[static_cast<std::size_t>(Rule::degree_one)] = true;
  cfg.enabled[static_cast<std::size_t>(Rule::basic_single_edge)] = true;
  auto st = make_state(g, all_on_zero(4), 0, cfg);
  EXPECT_TRUE(local_reduce(st));
  EXPECT_GT(st.rule_counts[static_cast<std::size_t>(Rule::basic_single_edge)], 0u);
  EXPECT_GT(st.rule_counts[static_cast<std::size_t>(Rule::degree_one)], 0u);
  EXPECT_EQ(alpha_after(st, g), exact_alpha(g));
}

// Every single rule application on a one-PE graph preserves α.
TEST(RuleSafety, EachApplicationPreservesAlpha) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const std::size_t n = 4 + seed % 12;
    auto g = testing::random_graph(n, 0.1 + 0.05 * static_cast<double>(seed % 8), seed);
    ReductionConfig cfg;
    cfg.debug_checks = true;
    auto st = make_state(g, all_on_zero(n), 0, cfg);
    const Weight alpha = exact_alpha(g);
    for (bool again = true; again;) {
      again = false;
      for (auto rule : kRuleOrder) {
        for (auto v : st.lg.live_owned_vertices()) {
          if (!st.lg.live_owned(v) || !apply_rule(st, rule, v)) continue;
          ASSERT_EQ(alpha_after(st, g), alpha) << "seed " << seed << " rule " << to_string(rule);
          again = true;
        }
      }
    }
  }
}

}  // namespace
}  // namespace dmwis
