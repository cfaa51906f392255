#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dmwis/global_graph.hpp"
#include "dmwis/local_graph.hpp"
#include "dmwis/partition.hpp"
#include "dmwis/reduction_state.hpp"
#include "dmwis/reductions.hpp"
#include "dmwis/transport.hpp"

namespace dmwis {

enum class EngineMode { sync, async, threaded };

inline const char* to_string(EngineMode m) {
  switch (m) {
    case EngineMode::sync: return "sync";
    case EngineMode::async: return "async";
    case EngineMode::threaded: return "threaded";
  }
  return "?";
}

struct EngineConfig {
  EngineMode mode = EngineMode::sync;
  std::size_t buffer_threshold = 1024;
  std::uint64_t seed = 0;
  std::size_t max_steps = 50'000'000;
  ReductionConfig reduction;
};

struct EngineReport {
  std::size_t rounds = 0;           // outer iterations (sync) or scheduler rounds (async) with progress
  std::size_t scheduler_steps = 0;
  std::uint64_t trace_hash = 0;
  std::uint32_t peel_phases = 0;
};

// Reduced graph reassembled from the live owned vertices of all PEs, with the owners' weights.
struct Kernel {
  GlobalGraph graph;
  std::vector<GlobalId> ids;   // kernel vertex -> input vertex, ascending
  std::vector<Rank> owner;     // kernel vertex -> PE that owns it now
};

// Runs the distributed reduction on p simulated PEs. Reduction is resumable: reduce() may be
// called again after peel_step() removed vertices.
class DistributedReducer {
 public:
  DistributedReducer(const GlobalGraph& g, const Partition& part, EngineConfig cfg)
      : g_(&g),
        part_(part),
        cfg_(std::move(cfg)),
        transport_(part.num_pes(), cfg_.mode == EngineMode::sync ? TransportMode::sync : TransportMode::async,
                   cfg_.buffer_threshold) {
    DMWIS_ASSERT(part.assignment.size() == g.n(), "partition does not match graph");
    states_.reserve(part.num_pes());
    for (Rank i = 0; i < part.num_pes(); ++i) {
      states_.emplace_back(localize(g, part, i), cfg_.reduction);
      exclude_zero_weight(states_.back());
    }
  }

  [[nodiscard]] Rank num_pes() const { return part_.num_pes(); }
  [[nodiscard]] const GlobalGraph& input() const { return *g_; }
  [[nodiscard]] const Partition& partition() const { return part_; }
  [[nodiscard]] const EngineConfig& config() const { return cfg_; }
  [[nodiscard]] std::vector<ReductionState>& states() { return states_; }
  [[nodiscard]] const std::vector<ReductionState>& states() const { return states_; }
  [[nodiscard]] const Transport& transport() const { return transport_; }
  [[nodiscard]] const EngineReport& report() const { return report_; }

  // Reduces until no rule applies on any PE and no message is in flight.
  void reduce() {
    switch (cfg_.mode) {
      case EngineMode::sync: reduce_sync(); break;
      case EngineMode::async: reduce_async(false); break;
      case EngineMode::threaded: reduce_async(true); break;
    }
  }

  // Every PE with a live owned vertex excludes the one with the highest peel score; the peel
  // statuses are delivered before any rule runs again. Returns false once the kernel is empty.
  bool peel_step() {
    const std::uint32_t phase = report_.peel_phases + 1;
    bool any = false;
    for (auto& st : states_) {
      const LocalId v = peel_candidate(st);
      if (v == kInvalidLocal) continue;
      st.peel_vertex(v, phase);
      any = true;
    }
    if (!any) return false;
    report_.peel_phases = phase;
    for (auto& st : states_) st.send_statuses(transport_);
    if (cfg_.mode == EngineMode::sync) {
      deliver(transport_.exchange_barrier());
    } else {
      transport_.flush_all();
    }
    return true;
  }

  [[nodiscard]] Weight offset() const {
    Weight sum = 0;
    for (const auto& st : states_) sum = checked_add(sum, st.offset);
    return sum;
  }

  [[nodiscard]] Weight lost() const {
    Weight sum = 0;
    for (const auto& st : states_) sum = checked_add(sum, st.lost);
    return sum;
  }

  // Weight guaranteed by the reductions: Σ o_i minus the proposals that lose a conflict.
  [[nodiscard]] Weight effective_offset() const { return offset() - lost(); }

  [[nodiscard]] std::size_t num_live_owned() const {
    std::size_t sum = 0;
    for (const auto& st : states_) sum += st.lg.num_live_owned();
    return sum;
  }

  [[nodiscard]] Kernel kernel() const;

 private:
  bool deliver(const std::vector<std::vector<Message>>& batches) {
    bool changed = false;
    for (Rank i = 0; i < batches.size(); ++i) {
      for (const auto& m : batches[i]) changed = states_[i].receive(m) || changed;
    }
    return changed;
  }

  static bool empty_batches(const std::vector<std::vector<Message>>& batches) {
    return std::all_of(batches.begin(), batches.end(), [](const auto& b) { return b.empty(); });
  }

  static bool filter(ReductionState& st) {
    const auto before = st.events.size();
    st.filter_moves();
    return st.events.size() != before;
  }

  void reduce_sync() {
    while (true) {
      bool progress = false;
      for (auto& st : states_) progress = local_reduce(st) || progress;
      for (auto& st : states_) st.send_weight_updates(transport_);
      progress = deliver(transport_.exchange_barrier()) || progress;
      for (auto& st : states_) progress = filter(st) || progress;
      while (true) {
        for (auto& st : states_) st.send_statuses(transport_);
        auto batches = transport_.exchange_barrier();
        if (empty_batches(batches)) break;
        progress = deliver(batches) || progress;
      }
      if (!progress) break;
      ++report_.rounds;
    }
  }

  bool async_step(Rank i) {
    auto& st = states_[i];
    bool did = false;
    for (const auto& m : transport_.poll(i)) did = st.receive(m) || did;
    did = local_reduce(st) || did;
    did = filter(st) || did;
    st.send_weight_updates(transport_);
    st.send_statuses(transport_);
    transport_.flush(i);
    return did;
  }

  void reduce_async(bool threaded) {
    const StepFn step = [this](Rank i) { return async_step(i); };
    if (threaded) {
      const auto rep = ThreadedRunner::run(transport_, step);
      report_.scheduler_steps += rep.steps;
      ++report_.rounds;
      return;
    }
    const HasWorkFn has_work = [this](Rank i) {
      return !states_[i].dirty.empty() || states_[i].has_pending_output();
    };
    const auto rep = run_scheduler(transport_, step, has_work, cfg_.seed + report_.peel_phases, cfg_.max_steps);
    report_.rounds += rep.progress_rounds;
    report_.scheduler_steps += rep.steps;
    report_.trace_hash = hash_combine(report_.trace_hash, rep.trace_hash);
  }

  // Peel score ω(N(v)) − ω(v) (or deg(v) − ω(v)), maximised; ties to the smaller global ID.
  [[nodiscard]] LocalId peel_candidate(const ReductionState& st) const {
    const auto& lg = st.lg;
    LocalId best = kInvalidLocal;
    Weight best_pos = 0;
    Weight best_neg = 0;
    for (auto v : lg.live_owned_vertices()) {
      const Weight pos = cfg_.reduction.peel_score == PeelScore::degree_minus_weight
                             ? static_cast<Weight>(lg.live_degree(v))
                             : lg.live_neighborhood_weight(v);
      const Weight neg = lg.weight(v);
      // pos - neg > best_pos - best_neg, evaluated without signed overflow
      const bool better = best == kInvalidLocal ||
                          checked_add(pos, best_neg) > checked_add(best_pos, neg) ||
                          (checked_add(pos, best_neg) == checked_add(best_pos, neg) &&
                           lg.global(v) < lg.global(best));
      if (better) {
        best = v;
        best_pos = pos;
        best_neg = neg;
      }
    }
    return best;
  }

  const GlobalGraph* g_;
  Partition part_;
  EngineConfig cfg_;
  Transport transport_;
  std::vector<ReductionState> states_;
  EngineReport report_;
};

// Reassembles the kernel and checks that it is exactly the input graph induced on the
// surviving vertices, seen consistently from both sides of every cut edge.
inline Kernel assemble_kernel(const std::vector<ReductionState>& states, const GlobalGraph& input) {
  const std::size_t n = input.n();
  std::vector<Rank> owner_of(n, kInvalidRank);
  std::vector<Weight> weight_of(n, 0);
  for (const auto& st : states) {
    for (auto v : st.lg.live_owned_vertices()) {
      const GlobalId gv = st.lg.global(v);
      DMWIS_ASSERT(owner_of[gv] == kInvalidRank, "vertex " + std::to_string(gv) + " live on two PEs");
      owner_of[gv] = st.rank();
      weight_of[gv] = st.lg.weight(v);
    }
  }
  Kernel k;
  std::vector<GlobalId> index(n, kInvalidGlobal);
  for (GlobalId v = 0; v < n; ++v) {
    if (owner_of[v] == kInvalidRank) continue;
    index[v] = static_cast<GlobalId>(k.ids.size());
    k.ids.push_back(v);
    k.owner.push_back(owner_of[v]);
  }
  std::vector<std::pair<GlobalId, GlobalId>> arcs;
  for (const auto& st : states) {
    const auto& lg = st.lg;
    for (auto v : lg.live_owned_vertices()) {
      lg.for_each_live_neighbor(v, [&](LocalId u) {
        const GlobalId gu = lg.global(u);
        DMWIS_ASSERT(owner_of[gu] != kInvalidRank,
                     "PE " + std::to_string(st.rank()) + " sees " + std::to_string(gu) +
                         " as live but no PE owns it");
        arcs.emplace_back(index[lg.global(v)], index[gu]);
      });
    }
  }
  std::sort(arcs.begin(), arcs.end());
  std::vector<Edge> edges;
  for (auto [a, b] : arcs) {
    DMWIS_ASSERT(std::binary_search(arcs.begin(), arcs.end(), std::make_pair(b, a)),
                 "kernel edge {" + std::to_string(k.ids[a]) + "," + std::to_string(k.ids[b]) +
                     "} seen from one side only");
    if (a < b) edges.push_back({a, b});
  }
  std::vector<Weight> weights;
  weights.reserve(k.ids.size());
  for (auto v : k.ids) weights.push_back(weight_of[v]);
  k.graph = build_global(edges, std::move(weights));
  const auto induced = induced_subgraph(input, k.ids);
  DMWIS_ASSERT(induced.offsets() == k.graph.offsets() && induced.targets() == k.graph.targets(),
               "kernel is not the input graph induced on the surviving vertices");
  return k;
}

inline Kernel DistributedReducer::kernel() const { return assemble_kernel(states_, *g_); }

// Number of rule applications on copies of the PE states after marking every live owned vertex
// dirty. Zero means the states are at a global fixpoint.
inline std::size_t fixpoint_violations(const std::vector<ReductionState>& states) {
  std::size_t fired = 0;
  for (const auto& st : states) {
    ReductionState copy = st;
    for (auto v : copy.lg.live_owned_vertices()) copy.dirty.mark(v);
    const auto before = copy.events.size();
    local_reduce(copy);
    fired += copy.events.size() - before;
    if (copy.has_pending_output()) ++fired;
  }
  return fired;
}

inline std::size_t audit_violations(const std::vector<ReductionState>& states) {
  std::size_t sum = 0;
  for (const auto& st : states) sum += st.lg.audit().violations;
  return sum;
}

}  // namespace dmwis
