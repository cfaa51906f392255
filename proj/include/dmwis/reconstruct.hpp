#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dmwis/events.hpp"
#include "dmwis/global_graph.hpp"
#include "dmwis/reduction_state.hpp"
#include "dmwis/transport.hpp"

namespace dmwis {

struct Solution {
  std::vector<GlobalId> vertices;  // ascending
  Weight weight = 0;               // ω(I) on the input graph
  std::size_t reconstruction_rounds = 0;
  TransportStats messages;
};

// Independence and weight of a vertex set in the input graph.
inline Weight validate_solution(const GlobalGraph& g, const std::vector<GlobalId>& vertices) {
  std::vector<std::uint8_t> in(g.n(), 0);
  for (auto v : vertices) {
    DMWIS_ASSERT(v < g.n(), "solution vertex " + std::to_string(v) + " out of range");
    DMWIS_ASSERT(!in[v], "solution lists vertex " + std::to_string(v) + " twice");
    in[v] = 1;
  }
  for (auto v : vertices) {
    for (auto u : g.neighbors(v)) {
      DMWIS_ASSERT(!in[u], "solution contains the edge {" + std::to_string(v) + "," + std::to_string(u) + "}");
    }
  }
  return g.weight_of(vertices);
}

namespace detail {

// Unwinds one PE's event stack. Decisions of vertices decided elsewhere arrive as
// SolutionStatus messages; own decisions are published to every PE that may depend on them.
class Unwinder {
 public:
  Unwinder(const ReductionState& st, std::size_t n) : st_(&st), known_(n, -1) {
    const auto& lg = st.lg;
    for (const auto& e : st.events) {
      if (e.kind == EventKind::peel) peeled_.insert(e.pivot);
      if (e.kind == EventKind::adopt || e.kind == EventKind::void_move) origin_[e.pivot] = e.peer;
    }
    for (const auto& c : st.conflicts) {
      if (c.their_rank < lg.rank()) losers_.insert(c.mine);
    }
    cursor_ = st.events.size();
  }

  // Proposal exchange: announce every proposal to the PEs adjacent when it was made.
  void send_proposals(Transport& t) const {
    for (const auto& e : st_->events) {
      if (e.kind != EventKind::include_proposal) continue;
      VertexStatus s;
      s.v = e.pivot;
      s.status = StatusKind::proposed;
      s.weight = e.pivot_weight;
      for (auto r : e.recv) t.send({st_->rank(), r, s});
    }
  }

  // A received proposal adjacent to one of ours must be exactly a conflict recorded during reduction.
  void check_proposals(const std::vector<Message>& msgs) const {
    std::unordered_map<GlobalId, const ReductionEvent*> by_ghost;
    for (const auto& e : st_->events) {
      if (e.kind != EventKind::include_proposal) continue;
      for (auto g : e.ghosts) by_ghost[g] = &e;
    }
    std::vector<Conflict> found;
    for (const auto& m : msgs) {
      const auto* s = std::get_if<VertexStatus>(&m.payload);
      if (s == nullptr || s->status != StatusKind::proposed) throw ProtocolError("unexpected message in proposal exchange");
      auto it = by_ghost.find(s->v);
      if (it == by_ghost.end()) continue;
      found.push_back({it->second->pivot, s->v, m.src, s->weight});
      if (it->second->pivot_weight != s->weight) {
        throw ProtocolError("conflicting proposals " + std::to_string(it->second->pivot) + " and " +
                            std::to_string(s->v) + " differ in weight");
      }
    }
    auto recorded = st_->conflicts;
    auto key = [](const Conflict& a, const Conflict& b) { return std::tie(a.mine, a.theirs) < std::tie(b.mine, b.theirs); };
    std::sort(found.begin(), found.end(), key);
    std::sort(recorded.begin(), recorded.end(), key);
    if (found != recorded) {
      throw ProtocolError("PE " + std::to_string(st_->rank()) + ": proposal exchange found " +
                          std::to_string(found.size()) + " conflicts, reduction recorded " +
                          std::to_string(recorded.size()));
    }
  }

  void init(const std::unordered_set<GlobalId>& kernel_in, Transport& t) {
    const auto& lg = st_->lg;
    for (LocalId v = 0; v < lg.size(); ++v) {
      if (!lg.is_owned(v)) continue;
      const GlobalId gv = lg.global(v);
      if (lg.live(v)) {
        decide(gv, kernel_in.count(gv) != 0, t);
      } else if (lg.state(v) == VertexState::excluded && !peeled_.count(gv)) {
        decide(gv, false, t);
      }
    }
  }

  bool receive(const Message& m, Transport& t) {
    const auto* s = std::get_if<SolutionStatus>(&m.payload);
    if (s == nullptr) throw ProtocolError("unexpected message during reconstruction");
    learn(s->v, s->in);
    const auto& lg = st_->lg;
    const LocalId v = lg.local(s->v);
    // decisions about vertices handed away are forwarded to the replica holders
    if (lg.is_owned(v) && v < lg.num_owned() && lg.state(v) == VertexState::moved_out) publish(v, s->in, t);
    return true;
  }

  // Pops every event that can be resolved with the decisions known so far.
  bool unwind(Transport& t) {
    bool popped = false;
    while (cursor_ > 0) {
      const auto& e = st_->events[cursor_ - 1];
      if (!resolve(e, t)) break;
      --cursor_;
      popped = true;
    }
    return popped;
  }

  [[nodiscard]] bool done() const { return cursor_ == 0; }
  [[nodiscard]] const std::vector<std::pair<GlobalId, bool>>& decisions() const { return mine_; }

 private:
  [[nodiscard]] int known(GlobalId v) const { return known_[v]; }

  void learn(GlobalId v, bool in) {
    if (known_[v] != -1 && known_[v] != static_cast<int>(in)) {
      throw ProtocolError("contradicting decisions for vertex " + std::to_string(v));
    }
    known_[v] = in ? 1 : 0;
  }

  void decide(GlobalId v, bool in, Transport& t) {
    learn(v, in);
    mine_.emplace_back(v, in);
    const auto& lg = st_->lg;
    const LocalId lv = lg.local(v);
    if (lv < lg.num_owned()) {
      publish(lv, in, t);
    } else {
      auto it = origin_.find(v);
      DMWIS_ASSERT(it != origin_.end(), "decision for a vertex that is neither owned nor received");
      t.send({st_->rank(), it->second, SolutionStatus{v, in}});
    }
  }

  void publish(LocalId v, bool in, Transport& t) const {
    for (auto r : st_->lg.initial_recv(v)) t.send({st_->rank(), r, SolutionStatus{st_->lg.global(v), in}});
  }

  // Each dependency must be decided; same-phase peels of lower ranks are ignored, which is the
  // other side of those PEs waiting for ours.
  bool none_in(const ReductionEvent& e, bool& ready) const {
    const auto& lg = st_->lg;
    bool any_in = false;
    ready = true;
    for (auto d : e.depends) {
      if (e.kind == EventKind::peel) {
        const LocalId ld = lg.local(d);
        if (lg.is_ghost(ld)) {
          const auto& death = st_->ghost_death(ld);
          if (death.cause == GhostRemoval::remote_peel && death.peel_phase == e.phase && lg.owner(ld) < st_->rank()) {
            continue;
          }
        }
      }
      const int k = known(d);
      if (k == -1) {
        ready = false;
        return false;
      }
      any_in = any_in || k == 1;
    }
    return !any_in;
  }

  bool resolve(const ReductionEvent& e, Transport& t) {
    switch (e.kind) {
      case EventKind::include:
      case EventKind::race_won:
        decide(e.pivot, true, t);
        return true;
      case EventKind::include_proposal:
        decide(e.pivot, !losers_.count(e.pivot), t);
        return true;
      case EventKind::void_move:
      case EventKind::race_lost:
        decide(e.pivot, false, t);
        return true;
      case EventKind::exclude:
      case EventKind::move:
      case EventKind::adopt:
        return true;
      case EventKind::degree_one_fold:
      case EventKind::swt_fold:
      case EventKind::peel: {
        bool ready = false;
        const bool in = none_in(e, ready);
        if (!ready) return false;
        decide(e.pivot, in, t);
        return true;
      }
    }
    return false;
  }

  const ReductionState* st_;
  std::vector<std::int8_t> known_;
  std::unordered_set<GlobalId> peeled_;
  std::unordered_set<GlobalId> losers_;
  std::unordered_map<GlobalId, Rank> origin_;
  std::vector<std::pair<GlobalId, bool>> mine_;
  std::size_t cursor_ = 0;
};

}  // namespace detail

// Turns the reduced PE states and a solution of the kernel (kernel_in: kernel vertices in the
// set, by input ID) into an independent set of the input graph.
inline Solution reconstruct(const std::vector<ReductionState>& states, const GlobalGraph& input,
                            const std::vector<GlobalId>& kernel_in) {
  const auto p = static_cast<Rank>(states.size());
  Transport t(p, TransportMode::sync);
  std::vector<detail::Unwinder> pes;
  pes.reserve(p);
  for (const auto& st : states) pes.emplace_back(st, input.n());

  for (auto& pe : pes) pe.send_proposals(t);
  auto batches = t.exchange_barrier();
  for (Rank i = 0; i < p; ++i) pes[i].check_proposals(batches[i]);

  const std::unordered_set<GlobalId> in_set(kernel_in.begin(), kernel_in.end());
  for (auto& pe : pes) pe.init(in_set, t);

  Solution sol;
  while (true) {
    bool progress = false;
    batches = t.exchange_barrier();
    for (Rank i = 0; i < p; ++i) {
      for (const auto& m : batches[i]) progress = pes[i].receive(m, t) || progress;
    }
    for (auto& pe : pes) progress = pe.unwind(t) || progress;
    ++sol.reconstruction_rounds;
    if (std::all_of(pes.begin(), pes.end(), [](const auto& pe) { return pe.done(); })) break;
    if (!progress) throw ProtocolError("reconstruction stalled with undecided events");
  }
  // deliver trailing decisions so that every message sent is also received
  for (batches = t.exchange_barrier(); !std::all_of(batches.begin(), batches.end(), [](const auto& b) { return b.empty(); });
       batches = t.exchange_barrier()) {
    for (Rank i = 0; i < p; ++i) {
      for (const auto& m : batches[i]) pes[i].receive(m, t);
    }
  }

  std::vector<std::uint8_t> decided(input.n(), 0);
  for (const auto& pe : pes) {
    for (auto [v, in] : pe.decisions()) {
      DMWIS_ASSERT(!decided[v], "vertex " + std::to_string(v) + " decided by two PEs");
      decided[v] = 1;
      if (in) sol.vertices.push_back(v);
    }
  }
  for (GlobalId v = 0; v < input.n(); ++v) {
    DMWIS_ASSERT(decided[v], "vertex " + std::to_string(v) + " was never decided");
  }
  std::sort(sol.vertices.begin(), sol.vertices.end());
  sol.weight = validate_solution(input, sol.vertices);
  sol.messages = t.stats();
  return sol;
}

}  // namespace dmwis
