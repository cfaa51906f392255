#pragma once

#include <random>
#include <vector>

#include "dmwis/engine.hpp"
#include "dmwis/global_graph.hpp"
#include "dmwis/partition.hpp"

namespace dmwis::testing {

inline GlobalGraph make_graph(std::vector<Weight> weights, const std::vector<Edge>& edges) {
  return build_global(edges, std::move(weights));
}

inline GlobalGraph random_graph(std::size_t n, double density, std::uint64_t seed, Weight lo = 1,
                                Weight hi = 200) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Weight> wd(lo, hi);
  std::bernoulli_distribution ed(density);
  std::vector<Weight> w(n);
  for (auto& x : w) x = wd(rng);
  std::vector<Edge> edges;
  for (GlobalId u = 0; u < n; ++u) {
    for (GlobalId v = u + 1; v < n; ++v) {
      if (ed(rng)) edges.push_back({u, v});
    }
  }
  return build_global(edges, std::move(w));
}

inline ReductionState make_state(const GlobalGraph& g, const std::vector<Rank>& assignment, Rank pe,
                                 ReductionConfig cfg = {}) {
  const Rank p = *std::max_element(assignment.begin(), assignment.end()) + 1;
  return ReductionState(localize(g, partition_from_assignment(assignment, p), pe), std::move(cfg));
}

// Heavy Vertex example: v(10), d(4), e(4) on PE 0; ghosts a(3), b(3), c(4) on PE 1.
struct HeavyVertexExample {
  enum : GlobalId { v, d, e, a, b, c };
  GlobalGraph g = make_graph({10, 4, 4, 3, 3, 4}, {{a, v}, {b, v}, {c, d}, {v, d}, {v, e}, {d, e}});
  std::vector<Rank> assignment = {0, 0, 0, 1, 1, 1};
};

// Basic Single-Edge example: v(7), u(10), d(4) on PE 0; ghosts a(7), b(2) on PE 1.
struct BasicSingleEdgeExample {
  enum : GlobalId { v, u, d, a, b };
  GlobalGraph g = make_graph({7, 10, 4, 7, 2}, {{a, v}, {a, u}, {b, u}, {v, u}, {v, d}, {u, d}});
  std::vector<Rank> assignment = {0, 0, 0, 1, 1};
};

// Extended Single-Edge example: v(11), u(7), x1(2), x2(1) on PE 0; ghosts a(7), b(2) on PE 1.
struct ExtendedSingleEdgeExample {
  enum : GlobalId { v, u, x1, x2, a, b };
  GlobalGraph g = make_graph({11, 7, 2, 1, 7, 2},
                             {{a, v}, {a, u}, {b, u}, {v, u}, {v, x1}, {v, x2}, {u, x1}, {u, x2}});
  std::vector<Rank> assignment = {0, 0, 0, 0, 1, 1};
};

// Two PEs propose the endpoints of the cut edge {c, x} in the same round.
// Path z(9) - a(1) - c(5) | x(5) - b(1) - y(9), PE 0 = {z, a, c}, PE 1 = {x, b, y}.
struct ConflictExample {
  enum : GlobalId { z, a, c, x, b, y };
  GlobalGraph g = make_graph({9, 1, 5, 5, 1, 9}, {{z, a}, {a, c}, {c, x}, {x, b}, {b, y}});
  std::vector<Rank> assignment = {0, 0, 0, 1, 1, 1};
};

}  // namespace dmwis::testing
