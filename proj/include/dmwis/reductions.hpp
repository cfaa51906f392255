#pragma once

#include <algorithm>
#include <vector>

#include "dmwis/exact_solver.hpp"
#include "dmwis/reduction_state.hpp"

namespace dmwis {

namespace detail {

// Owned live neighbours of v, heaviest first, ties by smaller global ID.
inline std::vector<LocalId> owned_neighbors_by_weight(const LocalGraph& lg, LocalId v) {
  std::vector<LocalId> out;
  lg.for_each_live_neighbor(v, [&](LocalId u) {
    if (lg.is_owned(u)) out.push_back(u);
  });
  std::sort(out.begin(), out.end(), [&](LocalId a, LocalId b) {
    if (lg.weight(a) != lg.weight(b)) return lg.weight(a) > lg.weight(b);
    return lg.global(a) < lg.global(b);
  });
  return out;
}

// N_i(v) forms a clique in G_i. Two ghosts are never adjacent in G_i.
inline bool is_clique_neighborhood(const LocalGraph& lg, LocalId v, const std::vector<LocalId>& nb) {
  std::size_t ghosts = 0;
  for (auto u : nb) {
    if (lg.is_ghost(u)) ++ghosts;
    if (lg.live_degree(u) + 1 < nb.size()) return false;
  }
  if (ghosts > 1) return false;
  for (std::size_t a = 0; a < nb.size(); ++a) {
    for (std::size_t b = a + 1; b < nb.size(); ++b) {
      if (!lg.adjacent(nb[a], nb[b])) return false;
    }
  }
  (void)v;
  return true;
}

inline bool is_simplicial(const LocalGraph& lg, LocalId v) {
  return is_clique_neighborhood(lg, v, lg.live_neighbors(v));
}

}  // namespace detail

inline bool try_degree_one(ReductionState& st, LocalId v) {
  auto& lg = st.lg;
  if (lg.live_degree(v) != 1) return false;
  LocalId u = kInvalidLocal;
  lg.for_each_live_neighbor(v, [&](LocalId x) { u = x; });
  if (lg.weight(v) >= lg.weight(u)) {
    st.include_vertex(v);
  } else if (lg.is_owned(u)) {
    st.fold_degree_one(v, u);
  } else {
    st.move_vertex(v, u);
  }
  return true;
}

inline bool try_neighborhood_removal(ReductionState& st, LocalId v) {
  if (st.lg.weight(v) < st.lg.live_neighborhood_weight(v)) return false;
  st.include_vertex(v);
  return true;
}

inline bool try_simplicial_vertex(ReductionState& st, LocalId v) {
  const auto& lg = st.lg;
  const auto nb = lg.live_neighbors(v);
  for (auto u : nb) {
    if (lg.weight(u) > lg.weight(v)) return false;
  }
  if (!detail::is_clique_neighborhood(lg, v, nb)) return false;
  st.include_vertex(v);
  return true;
}

inline bool try_simplicial_weight_transfer(ReductionState& st, LocalId v) {
  const auto& lg = st.lg;
  if (lg.has_live_ghost_neighbor(v)) return false;
  const auto nb = lg.live_neighbors(v);
  if (nb.empty()) return false;
  const Weight wv = lg.weight(v);
  Weight max_nb = 0;
  for (auto u : nb) max_nb = std::max(max_nb, lg.weight(u));
  if (wv >= max_nb) return false;
  if (!detail::is_clique_neighborhood(lg, v, nb)) return false;
  for (auto u : nb) {
    if (lg.weight(u) > wv && detail::is_simplicial(lg, u)) return false;
  }
  std::vector<LocalId> removed;
  std::vector<LocalId> survivors;
  for (auto u : nb) (lg.weight(u) <= wv ? removed : survivors).push_back(u);
  st.fold_simplicial(v, removed, survivors);
  return true;
}

inline bool try_basic_single_edge(ReductionState& st, LocalId v) {
  const auto& lg = st.lg;
  for (auto u : detail::owned_neighbors_by_weight(lg, v)) {
    Weight outside = 0;
    bool too_heavy = false;
    lg.for_each_live_neighbor(u, [&](LocalId x) {
      if (too_heavy || (x != v && lg.adjacent(v, x))) return;
      outside = checked_add(outside, lg.weight(x));
      if (outside > lg.weight(u)) too_heavy = true;
    });
    if (!too_heavy) {
      st.exclude_set({v});
      return true;
    }
  }
  return false;
}

inline bool try_extended_single_edge(ReductionState& st, LocalId v) {
  const auto& lg = st.lg;
  const Weight nw = lg.live_neighborhood_weight(v);
  for (auto u : detail::owned_neighbors_by_weight(lg, v)) {
    if (nw > checked_add(lg.weight(v), lg.weight(u))) continue;
    std::vector<LocalId> x;
    lg.for_each_live_neighbor(v, [&](LocalId w) {
      if (w != u && lg.is_owned(w) && lg.adjacent(u, w)) x.push_back(w);
    });
    if (x.empty()) continue;
    st.exclude_set(x);
    return true;
  }
  return false;
}

inline bool try_heavy_vertex(ReductionState& st, LocalId v) {
  const auto& lg = st.lg;
  if (lg.live_degree(v) > st.config.max_subproblem) return false;
  const auto nb = lg.live_neighbors(v);
  const auto sp = st.neighborhood_subproblem(nb);
  if (lg.weight(v) < solve_exact_capped(sp, st.config.max_subproblem).weight) return false;
  st.include_vertex(v);
  return true;
}

// Applies the first registered sequential rule whose evaluation neither read a ghost nor an
// interface vertex.
inline bool try_meta_rule(ReductionState& st, LocalId v) {
  for (const auto& named : st.config.meta_rules) {
    ReadProbe probe(st.lg);
    auto plan = named.rule(probe, v);
    if (plan.kind == SequentialPlan::Kind::none || probe.touched_border()) continue;
    switch (plan.kind) {
      case SequentialPlan::Kind::include: st.include_vertex(plan.v); break;
      case SequentialPlan::Kind::fold_degree_one: st.fold_degree_one(plan.v, plan.partner); break;
      case SequentialPlan::Kind::exclude: st.exclude_set(plan.excluded); break;
      case SequentialPlan::Kind::none: break;
    }
    return true;
  }
  return false;
}

// ---- sequential rules for the meta slot ---------------------------------------------------

inline SequentialPlan sequential_degree_one(const ReadProbe& g, LocalId v) {
  const auto nb = g.neighbors(v);
  if (nb.size() != 1) return {};
  SequentialPlan plan;
  plan.v = v;
  if (g.weight(v) >= g.weight(nb[0])) {
    plan.kind = SequentialPlan::Kind::include;
  } else {
    plan.kind = SequentialPlan::Kind::fold_degree_one;
    plan.partner = nb[0];
  }
  return plan;
}

inline SequentialPlan sequential_neighborhood_removal(const ReadProbe& g, LocalId v) {
  Weight sum = 0;
  for (auto u : g.neighbors(v)) sum = checked_add(sum, g.weight(u));
  if (g.weight(v) < sum) return {};
  SequentialPlan plan;
  plan.kind = SequentialPlan::Kind::include;
  plan.v = v;
  return plan;
}

inline SequentialRule sequential_heavy_vertex(std::size_t cap) {
  return [cap](const ReadProbe& g, LocalId v) -> SequentialPlan {
    if (g.degree(v) > cap) return {};
    const auto nb = g.neighbors(v);
    SubProblem sp;
    for (auto u : nb) sp.vertices.push_back({u, g.weight(u)});
    for (std::uint32_t a = 0; a < nb.size(); ++a) {
      for (std::uint32_t b = a + 1; b < nb.size(); ++b) {
        if (g.adjacent(nb[a], nb[b])) sp.edges.emplace_back(a, b);
      }
    }
    if (g.weight(v) < solve_exact_weight(sp)) return {};
    SequentialPlan plan;
    plan.kind = SequentialPlan::Kind::include;
    plan.v = v;
    return plan;
  };
}

inline std::vector<NamedSequentialRule> default_sequential_rules(std::size_t cap) {
  return {{"degree_one", sequential_degree_one},
          {"neighborhood_removal", sequential_neighborhood_removal},
          {"heavy_vertex", sequential_heavy_vertex(cap)}};
}

// ---- rule order ---------------------------------------------------------------------------

inline constexpr std::array<Rule, kNumRules> kRuleOrder = {
    Rule::degree_one,          Rule::neighborhood_removal, Rule::simplicial_weight_transfer,
    Rule::simplicial_vertex,   Rule::basic_single_edge,    Rule::extended_single_edge,
    Rule::meta,                Rule::heavy_vertex,
};

inline bool apply_rule(ReductionState& st, Rule r, LocalId v) {
  switch (r) {
    case Rule::degree_one: return try_degree_one(st, v);
    case Rule::neighborhood_removal: return try_neighborhood_removal(st, v);
    case Rule::simplicial_weight_transfer: return try_simplicial_weight_transfer(st, v);
    case Rule::simplicial_vertex: return try_simplicial_vertex(st, v);
    case Rule::basic_single_edge: return try_basic_single_edge(st, v);
    case Rule::extended_single_edge: return try_extended_single_edge(st, v);
    case Rule::meta: return try_meta_rule(st, v);
    case Rule::heavy_vertex: return try_heavy_vertex(st, v);
  }
  return false;
}

// Weight-0 owned vertices never need to be in a solution; they are excluded before any rule
// runs so that every rule sees strictly positive weights.
inline bool exclude_zero_weight(ReductionState& st) {
  std::vector<LocalId> zero;
  for (auto v : st.lg.live_owned_vertices()) {
    if (st.lg.weight(v) == 0) zero.push_back(v);
  }
  st.exclude_set(zero);
  st.counters.zero_weight += zero.size();
  return !zero.empty();
}

// Applies the rules in order to dirty vertices until no rule applies; restarts from the first
// rule after every success. Returns whether any rule fired.
inline bool local_reduce(ReductionState& st) {
  bool any = false;
  std::size_t r = 0;
  while (r < kRuleOrder.size()) {
    const Rule rule = kRuleOrder[r];
    const auto slot = static_cast<std::size_t>(rule);
    bool fired = false;
    LocalId v = kInvalidLocal;
    if (st.config.enabled[slot]) {
      while (st.dirty.pop(slot, v)) {
        if (!st.lg.live_owned(v)) continue;
        if (apply_rule(st, rule, v)) {
          ++st.rule_counts[slot];
          fired = true;
          break;
        }
      }
    } else {
      while (st.dirty.pop(slot, v)) {
      }
    }
    if (fired) {
      any = true;
      r = 0;
    } else {
      ++r;
    }
  }
  return any;
}

}  // namespace dmwis
