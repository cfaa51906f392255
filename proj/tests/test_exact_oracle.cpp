#include <gtest/gtest.h>

#include <random>

#include "dmwis/exact_solver.hpp"
#include "fixtures.hpp"

namespace dmwis {
namespace {

using testing::random_graph;

// Independent oracle: all 2^n subsets, returns α and the lexicographically smallest optimal set.
std::pair<Weight, std::vector<GlobalId>> enumerate_all(const SubProblem& sp) {
  const std::size_t n = sp.size();
  std::vector<std::uint32_t> adj(n, 0);
  for (auto [a, b] : sp.edges) {
    adj[a] |= 1u << b;
    adj[b] |= 1u << a;
  }
  Weight best = 0;
  std::vector<GlobalId> best_set;
  bool have = false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool independent = true;
    Weight w = 0;
    std::vector<GlobalId> ids;
    for (std::size_t k = 0; k < n && independent; ++k) {
      if (!(mask >> k & 1u)) continue;
      if (adj[k] & mask) independent = false;
      w += sp.vertices[k].weight;
      ids.push_back(sp.vertices[k].id);
    }
    if (!independent) continue;
    std::sort(ids.begin(), ids.end());
    if (!have || w > best || (w == best && ids < best_set)) {
      best = w;
      best_set = ids;
      have = true;
    }
  }
  return {best, best_set};
}

SubProblem random_subproblem(std::size_t n, double density, std::uint64_t seed) {
  return to_subproblem(random_graph(n, density, seed));
}

void expect_independent(const SubProblem& sp, const std::vector<GlobalId>& witness) {
  for (auto [a, b] : sp.edges) {
    const bool ia = std::ranges::binary_search(witness, sp.vertices[a].id);
    const bool ib = std::ranges::binary_search(witness, sp.vertices[b].id);
    EXPECT_FALSE(ia && ib);
  }
}

TEST(SolveExact, EmptyGraph) {
  const auto sol = solve_exact(SubProblem{});
  EXPECT_EQ(sol.weight, 0u);
  EXPECT_TRUE(sol.witness.empty());
}

TEST(SolveExact, HeavyVertexNeighborhood) {
  // a(3), b(3), c(4), d(4), e(4) with edges c-d, d-e
  SubProblem sp;
  sp.vertices = {{0, 3}, {1, 3}, {2, 4}, {3, 4}, {4, 4}};
  sp.edges = {{2, 3}, {3, 4}};
  const auto sol = solve_exact(sp);
  EXPECT_EQ(sol.weight, 14u);
  EXPECT_EQ(sol.witness, (std::vector<GlobalId>{0, 1, 2, 4}));
}

TEST(SolveExact, HeavyVertexExampleAlpha) {
  // the neighbourhood of v inside its own PE graph: a, b, d, e with d-e
  testing::HeavyVertexExample fig;
  SubProblem sp;
  sp.vertices = {{fig.a, 3}, {fig.b, 3}, {fig.d, 4}, {fig.e, 4}};
  sp.edges = {{2, 3}};
  EXPECT_EQ(solve_exact(sp).weight, 10u);
}

TEST(SolveExact, MatchesEnumerationOn16Vertices) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sp = random_subproblem(16, 0.1 + 0.02 * static_cast<double>(seed), seed);
    const auto [alpha, witness] = enumerate_all(sp);
    const auto sol = solve_exact(sp);
    EXPECT_EQ(sol.weight, alpha) << "seed " << seed;
    EXPECT_EQ(sol.witness, witness) << "seed " << seed;
    EXPECT_EQ(solve_exact_weight(sp), alpha);
    expect_independent(sp, sol.witness);
  }
}

TEST(SolveExact, BranchAndBoundMatchesEnumeration) {
  // above the enumeration limit the branch-and-bound path is taken
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sp = random_subproblem(22, 0.15, 100 + seed);
    const auto [alpha, witness] = enumerate_all(sp);
    const auto sol = solve_exact(sp);
    EXPECT_EQ(sol.weight, alpha) << "seed " << seed;
    EXPECT_EQ(sol.witness, witness) << "seed " << seed;
  }
}

TEST(SolveExact, TiesPreferSmallestIds) {
  SubProblem sp;
  sp.vertices = {{7, 5}, {3, 5}, {9, 5}};
  sp.edges = {{0, 1}, {1, 2}, {0, 2}};
  EXPECT_EQ(solve_exact(sp).witness, (std::vector<GlobalId>{3}));
}

TEST(SolveExact, CapIsEnforced) {
  const auto sp = random_subproblem(11, 0.3, 1);
  EXPECT_THROW(solve_exact_capped(sp, 10), SubproblemTooLarge);
  EXPECT_NO_THROW(solve_exact_capped(sp, 11));
  const auto big = random_subproblem(65, 0.1, 1);
  EXPECT_THROW(solve_exact(big), SubproblemTooLarge);
}

TEST(AlphaUpperBound, Examples) {
  SubProblem triangle;
  triangle.vertices = {{0, 1}, {1, 1}, {2, 1}};
  triangle.edges = {{0, 1}, {1, 2}, {0, 2}};
  EXPECT_EQ(alpha_upper_bound(triangle), 3u);
  EXPECT_EQ(solve_exact(triangle).weight, 1u);

  SubProblem pair;
  pair.vertices = {{0, 2}, {1, 3}};
  EXPECT_EQ(alpha_upper_bound(pair), 5u);
  EXPECT_EQ(solve_exact(pair).weight, 5u);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto sp = random_subproblem(12, 0.3, seed);
    EXPECT_GE(alpha_upper_bound(sp), solve_exact(sp).weight);
  }
}

TEST(ExactAlpha, SplitsComponents) {
  // 10 disjoint triangles: 30 vertices, α is the sum of the heaviest vertex per triangle
  std::vector<Edge> edges;
  std::vector<Weight> w;
  Weight expected = 0;
  for (GlobalId t = 0; t < 10; ++t) {
    const GlobalId b = 3 * t;
    edges.push_back({b, b + 1});
    edges.push_back({b + 1, b + 2});
    edges.push_back({b, b + 2});
    w.insert(w.end(), {t + 1, t + 2, t + 3});
    expected += t + 3;
  }
  const auto g = build_global(edges, w);
  EXPECT_EQ(exact_alpha(g), expected);
}

}  // namespace
}  // namespace dmwis
