#pragma once

#include <vector>

#include "dmwis/engine.hpp"
#include "dmwis/greedy.hpp"
#include "dmwis/reconstruct.hpp"

namespace dmwis {

enum class Algorithm { reduce, greedy, reduce_greedy, reduce_peel };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::reduce: return "reduce";
    case Algorithm::greedy: return "greedy";
    case Algorithm::reduce_greedy: return "reduce-greedy";
    case Algorithm::reduce_peel: return "reduce-peel";
  }
  return "?";
}

struct SolveResult {
  Solution solution;
  Weight kernel_weight = 0;  // weight of the kernel solution with reduced weights
  std::size_t greedy_rounds = 0;
};

inline TransportMode transport_mode(EngineMode m) {
  return m == EngineMode::sync ? TransportMode::sync : TransportMode::async;
}

inline std::vector<const LocalGraph*> local_graphs(const std::vector<ReductionState>& states) {
  std::vector<const LocalGraph*> out;
  for (const auto& st : states) out.push_back(&st.lg);
  return out;
}

// Distributed greedy on the unreduced input.
inline SolveResult plain_greedy(const GlobalGraph& g, const Partition& part, const EngineConfig& cfg) {
  std::vector<LocalGraph> graphs;
  std::vector<const LocalGraph*> ptrs;
  graphs.reserve(part.num_pes());
  for (Rank i = 0; i < part.num_pes(); ++i) graphs.push_back(localize(g, part, i));
  for (const auto& lg : graphs) ptrs.push_back(&lg);
  auto greedy = greedy_luby(ptrs, transport_mode(cfg.mode), cfg.seed, cfg.buffer_threshold);
  SolveResult res;
  for (const auto& sel : greedy.selected) {
    res.solution.vertices.insert(res.solution.vertices.end(), sel.begin(), sel.end());
  }
  std::sort(res.solution.vertices.begin(), res.solution.vertices.end());
  res.solution.weight = validate_solution(g, res.solution.vertices);
  DMWIS_ASSERT(res.solution.weight == greedy.weight, "greedy weight differs from recomputed weight");
  res.solution.messages = greedy.messages;
  res.kernel_weight = greedy.weight;
  res.greedy_rounds = greedy.rounds;
  return res;
}

// Reduction to a global fixpoint, greedy on the kernel, then reconstruction.
inline SolveResult reduce_and_greedy(DistributedReducer& r) {
  r.reduce();
  const auto& cfg = r.config();
  auto greedy = greedy_luby(local_graphs(r.states()), transport_mode(cfg.mode), cfg.seed, cfg.buffer_threshold);
  std::vector<GlobalId> kernel_in;
  for (const auto& sel : greedy.selected) kernel_in.insert(kernel_in.end(), sel.begin(), sel.end());
  SolveResult res;
  res.solution = reconstruct(r.states(), r.input(), kernel_in);
  res.kernel_weight = greedy.weight;
  res.greedy_rounds = greedy.rounds;
  DMWIS_ASSERT(res.solution.weight == checked_add(r.effective_offset(), greedy.weight),
               "solution weight is not offset plus kernel solution weight");
  return res;
}

// Alternates reduction and peeling until no vertex is left, then reconstructs; peeled
// vertices re-enter the set whenever none of their neighbours did.
inline SolveResult reduce_and_peel(DistributedReducer& r) {
  r.reduce();
  while (r.peel_step()) r.reduce();
  SolveResult res;
  res.solution = reconstruct(r.states(), r.input(), {});
  Weight peeled_in = 0;
  std::vector<std::uint8_t> in(r.input().n(), 0);
  for (auto v : res.solution.vertices) in[v] = 1;
  for (const auto& st : r.states()) {
    for (const auto& e : st.events) {
      if (e.kind == EventKind::peel && in[e.pivot]) peeled_in = checked_add(peeled_in, e.pivot_weight);
    }
  }
  DMWIS_ASSERT(res.solution.weight == checked_add(r.effective_offset(), peeled_in),
               "solution weight is not offset plus re-inserted peel weight");
  return res;
}

}  // namespace dmwis
