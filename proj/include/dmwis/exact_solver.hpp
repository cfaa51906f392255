#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dmwis/global_graph.hpp"
#include "dmwis/types.hpp"

namespace dmwis {

// Small MWIS instance. Edges index into `vertices`.
struct SubProblem {
  struct Vertex {
    GlobalId id = 0;
    Weight weight = 0;
  };
  std::vector<Vertex> vertices;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  [[nodiscard]] std::size_t size() const { return vertices.size(); }
};

struct ExactSolution {
  Weight weight = 0;
  std::vector<GlobalId> witness;  // sorted ascending

  friend bool operator==(const ExactSolution&, const ExactSolution&) = default;
};

class SubproblemTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxExactVertices = 64;
inline constexpr std::size_t kEnumerationLimit = 20;

namespace detail {

using Mask = std::uint64_t;

inline Mask bit(std::size_t k) { return Mask{1} << k; }

// Positions are ordered by ascending global ID, so "position k" is the k-th smallest ID.
struct BitGraph {
  std::size_t n = 0;
  std::vector<Mask> adj;
  std::vector<Weight> weight;
  std::vector<GlobalId> id;

  [[nodiscard]] Weight weight_of(Mask m) const {
    Weight sum = 0;
    while (m) {
      sum = checked_add(sum, weight[static_cast<std::size_t>(std::countr_zero(m))]);
      m &= m - 1;
    }
    return sum;
  }
};

inline BitGraph to_bitgraph(const SubProblem& sp) {
  const std::size_t n = sp.size();
  if (n > kMaxExactVertices) {
    throw SubproblemTooLarge("exact solver supports at most 64 vertices, got " + std::to_string(n));
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return sp.vertices[a].id < sp.vertices[b].id; });
  std::vector<std::uint32_t> pos(n);
  for (std::uint32_t k = 0; k < n; ++k) pos[order[k]] = k;

  BitGraph bg;
  bg.n = n;
  bg.adj.assign(n, 0);
  bg.weight.resize(n);
  bg.id.resize(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    bg.weight[k] = sp.vertices[order[k]].weight;
    bg.id[k] = sp.vertices[order[k]].id;
  }
  for (auto [a, b] : sp.edges) {
    if (a >= n || b >= n) throw GraphError("subproblem edge index out of range");
    if (a == b) throw GraphError("subproblem contains a self-loop");
    bg.adj[pos[a]] |= bit(pos[b]);
    bg.adj[pos[b]] |= bit(pos[a]);
  }
  return bg;
}

// A beats B among equal weights iff the smallest position in the symmetric difference is in A.
inline bool lex_better(Mask a, Mask b) {
  const Mask diff = a ^ b;
  return diff != 0 && (a & (diff & (~diff + 1))) != 0;
}

struct Enumerator {
  const BitGraph& g;
  Weight best = 0;
  Mask best_set = 0;
  bool found = false;

  void run(Mask cand, Mask chosen, Weight w) {
    if (cand == 0) {
      if (!found || w > best || (w == best && lex_better(chosen, best_set))) {
        best = w;
        best_set = chosen;
        found = true;
      }
      return;
    }
    const auto k = static_cast<std::size_t>(std::countr_zero(cand));
    run(cand & ~g.adj[k] & ~bit(k), chosen | bit(k), w + g.weight[k]);
    run(cand & ~bit(k), chosen, w);
  }
};

// Weight-only branch and bound: branch on the maximum-degree candidate, prune on ω-sum.
struct BranchAndBound {
  const BitGraph& g;
  Weight best = 0;

  void run(Mask cand, Weight w) {
    if (w + g.weight_of(cand) <= best) {
      if (w > best) best = w;
      return;
    }
    std::size_t pivot = g.n;
    int pivot_degree = -1;
    for (Mask m = cand; m; m &= m - 1) {
      const auto k = static_cast<std::size_t>(std::countr_zero(m));
      const int d = std::popcount(g.adj[k] & cand);
      if (d > pivot_degree) {
        pivot_degree = d;
        pivot = k;
      }
    }
    if (pivot_degree <= 0) {
      best = std::max(best, w + g.weight_of(cand));
      return;
    }
    run(cand & ~g.adj[pivot] & ~bit(pivot), w + g.weight[pivot]);
    run(cand & ~bit(pivot), w);
  }
};

inline Weight alpha_of(const BitGraph& g, Mask cand) {
  if (cand == 0) return 0;
  BranchAndBound bb{g};
  bb.run(cand, 0);
  return bb.best;
}

inline Mask all_of(std::size_t n) { return n == 64 ? ~Mask{0} : bit(n) - 1; }

inline ExactSolution to_solution(const BitGraph& g, Mask set) {
  ExactSolution sol;
  sol.weight = g.weight_of(set);
  for (Mask m = set; m; m &= m - 1) sol.witness.push_back(g.id[static_cast<std::size_t>(std::countr_zero(m))]);
  return sol;
}

inline ExactSolution solve_bitgraph(const BitGraph& g) {
  if (g.n < kEnumerationLimit) {
    Enumerator e{g};
    e.run(all_of(g.n), 0, 0);
    return to_solution(g, e.best_set);
  }
  // α by branch and bound, then the preferred witness position by position
  const Mask everything = all_of(g.n);
  const Weight alpha = alpha_of(g, everything);
  Mask cand = everything;
  Mask chosen = 0;
  Weight chosen_weight = 0;
  while (cand) {
    const auto k = static_cast<std::size_t>(std::countr_zero(cand));
    const Mask rest = cand & ~g.adj[k] & ~bit(k);
    if (chosen_weight + g.weight[k] + alpha_of(g, rest) == alpha) {
      chosen |= bit(k);
      chosen_weight += g.weight[k];
      cand = rest;
    } else {
      cand &= ~bit(k);
    }
  }
  DMWIS_ASSERT(chosen_weight == alpha, "witness extraction lost weight");
  return to_solution(g, chosen);
}

}  // namespace detail

// Maximum weight independent set of a small graph. Among all optimal sets the witness is the
// one whose smallest differing ID is contained in it (lexicographic on sorted ID lists).
inline ExactSolution solve_exact(const SubProblem& sp) {
  const auto g = detail::to_bitgraph(sp);
  return detail::solve_bitgraph(g);
}

// In-rule entry point: refuses subproblems above the conexampled cap.
inline ExactSolution solve_exact_capped(const SubProblem& sp, std::size_t cap) {
  if (sp.size() > cap) {
    throw SubproblemTooLarge("subproblem with " + std::to_string(sp.size()) +
                             " vertices exceeds cap " + std::to_string(cap));
  }
  return solve_exact(sp);
}

// α only; cheaper than solve_exact because no witness is extracted.
inline Weight solve_exact_weight(const SubProblem& sp) {
  const auto g = detail::to_bitgraph(sp);
  return detail::alpha_of(g, detail::all_of(g.n));
}

// ω(V(sp)) >= α(sp).
inline Weight alpha_upper_bound(const SubProblem& sp) {
  Weight sum = 0;
  for (const auto& v : sp.vertices) sum = checked_add(sum, v.weight);
  return sum;
}

inline SubProblem to_subproblem(const GlobalGraph& g) {
  SubProblem sp;
  sp.vertices.reserve(g.n());
  for (GlobalId v = 0; v < g.n(); ++v) sp.vertices.push_back({v, g.weight(v)});
  for (const auto& e : g.edges()) sp.edges.emplace_back(e.u, e.v);
  return sp;
}

// α(G) for the test oracle and --verify; splits into connected components first so that
// sparse kernels well above 64 vertices are still solvable.
inline Weight exact_alpha(const GlobalGraph& g) {
  std::vector<GlobalId> comp(g.n(), kInvalidGlobal);
  Weight total = 0;
  std::vector<GlobalId> stack;
  for (GlobalId s = 0; s < g.n(); ++s) {
    if (comp[s] != kInvalidGlobal) continue;
    std::vector<GlobalId> members;
    stack.push_back(s);
    comp[s] = s;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (auto u : g.neighbors(v)) {
        if (comp[u] == kInvalidGlobal) {
          comp[u] = s;
          stack.push_back(u);
        }
      }
    }
    std::sort(members.begin(), members.end());
    auto sub = induced_subgraph(g, members);
    total = checked_add(total, solve_exact_weight(to_subproblem(sub)));
  }
  return total;
}

}  // namespace dmwis
