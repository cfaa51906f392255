#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmwis/events.hpp"
#include "dmwis/exact_solver.hpp"
#include "dmwis/local_graph.hpp"
#include "dmwis/transport.hpp"
#include "dmwis/types.hpp"

namespace dmwis {

enum class Rule : std::uint8_t {
  degree_one,
  neighborhood_removal,
  simplicial_weight_transfer,
  simplicial_vertex,
  basic_single_edge,
  extended_single_edge,
  meta,
  heavy_vertex,
};
inline constexpr std::size_t kNumRules = 8;

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::degree_one: return "degree_one";
    case Rule::neighborhood_removal: return "neighborhood_removal";
    case Rule::simplicial_weight_transfer: return "simplicial_weight_transfer";
    case Rule::simplicial_vertex: return "simplicial_vertex";
    case Rule::basic_single_edge: return "basic_single_edge";
    case Rule::extended_single_edge: return "extended_single_edge";
    case Rule::meta: return "meta";
    case Rule::heavy_vertex: return "heavy_vertex";
  }
  return "?";
}

// Counters for everything that changes a local graph outside of the rule catalog.
struct ProtocolCounters {
  std::uint64_t zero_weight = 0;
  std::uint64_t remote_include = 0;
  std::uint64_t remote_exclude = 0;
  std::uint64_t adopted = 0;
  std::uint64_t void_moves = 0;
  std::uint64_t move_races = 0;
  std::uint64_t filtered_moves = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t peels = 0;
};

// Per-rule pending vertex sets. A vertex is queued for every rule whenever something in its
// read-set (closed 2-neighbourhood) changed.
class DirtyQueue {
 public:
  DirtyQueue() = default;
  DirtyQueue(std::size_t n, std::size_t num_rules)
      : queues_(num_rules), heads_(num_rules, 0), member_(num_rules, std::vector<std::uint8_t>(n, 0)) {}

  void mark(LocalId v) {
    for (std::size_t r = 0; r < queues_.size(); ++r) {
      if (!member_[r][v]) {
        member_[r][v] = 1;
        queues_[r].push_back(v);
      }
    }
  }

  bool pop(std::size_t rule, LocalId& v) {
    auto& q = queues_[rule];
    if (heads_[rule] == q.size()) return false;
    v = q[heads_[rule]++];
    member_[rule][v] = 0;
    if (heads_[rule] == q.size()) {
      q.clear();
      heads_[rule] = 0;
    }
    return true;
  }

  [[nodiscard]] bool empty() const {
    for (std::size_t r = 0; r < queues_.size(); ++r) {
      if (heads_[r] < queues_[r].size()) return false;
    }
    return true;
  }

 private:
  std::vector<std::vector<LocalId>> queues_;
  std::vector<std::size_t> heads_;
  std::vector<std::vector<std::uint8_t>> member_;
};

struct StatusEntry {
  LocalId v = kInvalidLocal;
  VertexStatus status;
  std::vector<Rank> recv;  // adjacent PEs when the status was set
  bool dropped = false;
};

struct Conflict {
  GlobalId mine = kInvalidGlobal;
  GlobalId theirs = kInvalidGlobal;
  Rank their_rank = kInvalidRank;
  Weight weight = 0;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

struct GhostDeath {
  GhostRemoval cause = GhostRemoval::local_proposal;
  GlobalId killer = kInvalidGlobal;  // local proposal that dropped the ghost
  std::uint32_t peel_phase = 0;
};

// Read-only view of a LocalGraph that records every vertex a sequential rule inspects.
class ReadProbe {
 public:
  explicit ReadProbe(const LocalGraph& lg) : lg_(&lg) {}

  [[nodiscard]] Weight weight(LocalId v) const {
    touch(v);
    return lg_->weight(v);
  }
  [[nodiscard]] std::vector<LocalId> neighbors(LocalId v) const {
    touch(v);
    auto nb = lg_->live_neighbors(v);
    for (auto u : nb) touch(u);
    return nb;
  }
  [[nodiscard]] std::size_t degree(LocalId v) const {
    touch(v);
    return lg_->live_degree(v);
  }
  [[nodiscard]] bool adjacent(LocalId u, LocalId v) const {
    touch(u);
    touch(v);
    return lg_->adjacent(u, v);
  }
  [[nodiscard]] const std::vector<LocalId>& reads() const { return reads_; }

  // True if any vertex read so far is a ghost or an interface vertex.
  [[nodiscard]] bool touched_border() const {
    for (auto v : reads_) {
      if (lg_->is_ghost(v) || lg_->has_live_ghost_neighbor(v)) return true;
    }
    return false;
  }

 private:
  void touch(LocalId v) const { reads_.push_back(v); }

  const LocalGraph* lg_;
  mutable std::vector<LocalId> reads_;
};

// Outcome of a sequential rule evaluated through a ReadProbe; applied only by the meta rule.
struct SequentialPlan {
  enum class Kind : std::uint8_t { none, include, fold_degree_one, exclude } kind = Kind::none;
  LocalId v = kInvalidLocal;
  LocalId partner = kInvalidLocal;
  std::vector<LocalId> excluded;
};

using SequentialRule = std::function<SequentialPlan(const ReadProbe&, LocalId)>;

struct NamedSequentialRule {
  std::string name;
  SequentialRule rule;
};

enum class PeelScore : std::uint8_t { neighborhood_weight_minus_weight, degree_minus_weight };

struct ReductionConfig {
  std::size_t max_subproblem = 10;
  bool debug_checks = false;  // oracle re-check of every proposal precondition
  std::vector<NamedSequentialRule> meta_rules;  // sequential rules run behind the meta gate
  PeelScore peel_score = PeelScore::neighborhood_weight_minus_weight;
  std::array<bool, kNumRules> enabled = {true, true, true, true, true, true, true, true};
};

// Everything one PE owns during reduction: its local graph, offset, proposals, event stack and
// the pending border updates W_i (weights) and M_i (statuses).
class ReductionState {
 public:
  ReductionState() = default;
  ReductionState(LocalGraph lg, ReductionConfig cfg)
      : lg(std::move(lg)), config(std::move(cfg)), dirty(this->lg.size(), kNumRules) {
    deaths_.assign(this->lg.size(), GhostDeath{});
    in_w_.assign(this->lg.size(), 0);
    for (LocalId v = 0; v < this->lg.size(); ++v) {
      if (this->lg.is_owned(v)) dirty.mark(v);
    }
  }

  LocalGraph lg;
  ReductionConfig config;
  DirtyQueue dirty;
  Weight offset = 0;
  Weight lost = 0;  // weight of own proposals that lose a conflict
  std::vector<ReductionEvent> events;
  std::vector<LocalId> pending_weights;  // W_i in first-touch order
  std::vector<StatusEntry> pending_status;  // M_i
  std::vector<Conflict> conflicts;
  std::array<std::uint64_t, kNumRules> rule_counts{};
  ProtocolCounters counters;
  std::unordered_map<GlobalId, Rank> moved_to;

  [[nodiscard]] Rank rank() const { return lg.rank(); }
  [[nodiscard]] Weight effective_offset() const { return offset - lost; }
  [[nodiscard]] const GhostDeath& ghost_death(LocalId g) const { return deaths_[g]; }

  // ---- dirty marking -----------------------------------------------------------------

  void mark(LocalId v) {
    if (lg.live_owned(v)) dirty.mark(v);
  }

  // Queue every live owned vertex within distance two of x.
  void mark_around(LocalId x) {
    mark(x);
    for (auto u : lg.neighbors(x)) {
      if (!lg.live(u)) continue;
      mark(u);
      lg.for_each_live_neighbor(u, [&](LocalId w) { mark(w); });
    }
  }

  // ---- primitives (all border effects go through here) --------------------------------

  ReductionEvent make_event(EventKind kind, LocalId pivot) {
    ReductionEvent e;
    e.kind = kind;
    e.pivot = lg.global(pivot);
    e.pivot_weight = lg.weight(pivot);
    e.seq = next_seq_++;
    return e;
  }

  void push_event(ReductionEvent e) { events.push_back(std::move(e)); }

  void queue_status(LocalId v, VertexStatus s, std::vector<Rank> recv) {
    if (recv.empty()) return;
    pending_status.push_back({v, s, std::move(recv), false});
  }

  void note_weight_change(LocalId v) {
    if (!in_w_[v] && lg.is_interface(v)) {
      in_w_[v] = 1;
      pending_weights.push_back(v);
    }
  }

  // Removes a live owned vertex as excluded, notifying adjacent PEs if it is an interface vertex.
  void exclude_vertex(LocalId v, std::uint32_t peel_phase = 0) {
    auto recv = lg.recv(v);
    lg.remove_owned(v, VertexState::excluded);
    VertexStatus s;
    s.v = lg.global(v);
    s.status = StatusKind::excluded;
    s.weight = lg.weight(v);
    s.peel_phase = peel_phase;
    queue_status(v, s, std::move(recv));
    mark_around(v);
  }

  // Include operation: definite include if v has no live ghost neighbour, proposal otherwise.
  void include_vertex(LocalId v) {
    DMWIS_ASSERT(lg.live_owned(v), "include of a vertex that is not live and owned");
    const bool interface = lg.has_live_ghost_neighbor(v);
    auto e = make_event(interface ? EventKind::include_proposal : EventKind::include, v);
    std::vector<LocalId> owned_nb;
    std::vector<LocalId> ghost_nb;
    lg.for_each_live_neighbor(v, [&](LocalId u) { (lg.is_ghost(u) ? ghost_nb : owned_nb).push_back(u); });
    if (interface) {
      e.recv = lg.recv(v);
      if (config.debug_checks) check_proposal_precondition(v);
    }
    for (auto u : owned_nb) {
      e.removed.push_back(lg.global(u));
      exclude_vertex(u);
    }
    lg.remove_owned(v, interface ? VertexState::proposed : VertexState::included);
    for (auto g : ghost_nb) {
      e.ghosts.push_back(lg.global(g));
      lg.remove_ghost(g, GhostRemoval::local_proposal);
      deaths_[g] = {GhostRemoval::local_proposal, lg.global(v), 0};
    }
    offset = checked_add(offset, lg.weight(v));
    if (interface) {
      VertexStatus s;
      s.v = lg.global(v);
      s.status = StatusKind::proposed;
      s.weight = lg.weight(v);
      queue_status(v, s, e.recv);
    }
    mark_around(v);
    for (auto g : ghost_nb) mark_around(g);
    push_event(std::move(e));
  }

  // v has the single live owned neighbour u with ω(v) < ω(u): v is folded into u.
  void fold_degree_one(LocalId v, LocalId u) {
    auto e = make_event(EventKind::degree_one_fold, v);
    const Weight wv = lg.weight(v);
    e.depends.push_back(lg.global(u));
    e.weight_deltas.push_back({lg.global(u), lg.weight(u), lg.weight(u) - wv});
    lg.remove_owned(v, VertexState::folded);
    lg.set_weight(u, lg.weight(u) - wv);
    note_weight_change(u);
    offset = checked_add(offset, wv);
    mark_around(v);
    mark_around(u);
    push_event(std::move(e));
  }

  // Simplicial weight transfer: X \ {v} excluded, survivors lose ω(v), v folded.
  void fold_simplicial(LocalId v, const std::vector<LocalId>& x_minus_v, const std::vector<LocalId>& survivors) {
    auto e = make_event(EventKind::swt_fold, v);
    const Weight wv = lg.weight(v);
    for (auto x : x_minus_v) {
      e.removed.push_back(lg.global(x));
      exclude_vertex(x);
    }
    lg.remove_owned(v, VertexState::folded);
    for (auto s : survivors) {
      e.depends.push_back(lg.global(s));
      e.weight_deltas.push_back({lg.global(s), lg.weight(s), lg.weight(s) - wv});
      lg.set_weight(s, lg.weight(s) - wv);
      note_weight_change(s);
      mark_around(s);
    }
    offset = checked_add(offset, wv);
    mark_around(v);
    push_event(std::move(e));
  }

  void exclude_set(const std::vector<LocalId>& xs) {
    if (xs.empty()) return;
    auto e = make_event(EventKind::exclude, xs.front());
    for (auto x : xs) {
      e.removed.push_back(lg.global(x));
      exclude_vertex(x);
    }
    push_event(std::move(e));
  }

  // Degree-one interface vertex whose single ghost neighbour u is heavier: hand v to rank(u).
  void move_vertex(LocalId v, LocalId u) {
    DMWIS_ASSERT(lg.is_ghost(u), "move target neighbour must be a ghost");
    auto e = make_event(EventKind::move, v);
    e.peer = lg.owner(u);
    e.depends.push_back(lg.global(u));
    lg.remove_owned(v, VertexState::moved_out);
    moved_to[lg.global(v)] = e.peer;
    VertexStatus s;
    s.v = lg.global(v);
    s.status = StatusKind::moved;
    s.weight = lg.weight(v);
    s.neighbor = lg.global(u);
    queue_status(v, s, {e.peer});
    mark_around(v);
    push_event(std::move(e));
  }

  void peel_vertex(LocalId v, std::uint32_t phase) {
    auto e = make_event(EventKind::peel, v);
    e.phase = phase;
    lg.for_each_live_neighbor(v, [&](LocalId u) { e.depends.push_back(lg.global(u)); });
    exclude_vertex(v, phase);
    ++counters.peels;
    push_event(std::move(e));
  }

  // ---- FilterMoves ----------------------------------------------------------------------

  // A queued move whose single neighbour was dropped in the meantime by a local proposal or by
  // its owner's exclusion becomes a local include of the now isolated vertex. A neighbour that
  // its owner proposed stays in the solution, so that move is still sent.
  void filter_moves() {
    for (auto& entry : pending_status) {
      if (entry.dropped || entry.status.status != StatusKind::moved) continue;
      const LocalId u = lg.local(entry.status.neighbor);
      if (lg.live(u)) continue;
      const auto cause = deaths_[u].cause;
      if (cause == GhostRemoval::remote_include || cause == GhostRemoval::move_race) continue;
      entry.dropped = true;
      const LocalId v = entry.v;
      lg.reinstate(v, VertexState::included);
      moved_to.erase(lg.global(v));
      offset = checked_add(offset, lg.weight(v));
      push_event(make_event(EventKind::include, v));
      ++counters.filtered_moves;
    }
  }

  // ---- remote updates -------------------------------------------------------------------

  // Returns true if the local graph changed.
  bool on_weight_decrease(const WeightDecrease& m) {
    if (!lg.knows(m.v)) throw ProtocolError("weight update for unknown vertex " + std::to_string(m.v));
    const LocalId x = lg.local(m.v);
    if (lg.is_owned(x) || !lg.live(x) || m.weight == lg.weight(x)) return false;
    lg.lower_ghost_bound(x, m.weight);
    mark_around(x);
    return true;
  }

  bool on_status(const VertexStatus& s, Rank src) {
    if (!lg.knows(s.v)) throw ProtocolError("status for unknown vertex " + std::to_string(s.v));
    switch (s.status) {
      case StatusKind::excluded: return on_remote_exclude(s);
      case StatusKind::proposed: return apply_remote_include(s.v, s.weight, src);
      case StatusKind::moved: return on_move(s, src);
    }
    return false;
  }

  bool on_remote_exclude(const VertexStatus& s) {
    const LocalId x = lg.local(s.v);
    if (lg.is_owned(x)) throw ProtocolError("exclude status for owned vertex " + std::to_string(s.v));
    if (!lg.live(x)) return false;
    const auto cause = s.peel_phase ? GhostRemoval::remote_peel : GhostRemoval::remote_exclude;
    lg.remove_ghost(x, cause);
    deaths_[x] = {cause, kInvalidGlobal, s.peel_phase};
    ++counters.remote_exclude;
    mark_around(x);
    return true;
  }

  // A neighbour PE proposed ghost x for inclusion.
  bool apply_remote_include(GlobalId gx, Weight weight, Rank src) {
    const LocalId x = lg.local(gx);
    if (lg.is_owned(x)) throw ProtocolError("proposal for owned vertex " + std::to_string(gx));
    if (lg.live(x)) {
      std::vector<LocalId> dominated;
      lg.for_each_live_neighbor(x, [&](LocalId u) { dominated.push_back(u); });
      lg.remove_ghost(x, GhostRemoval::remote_include);
      deaths_[x] = {GhostRemoval::remote_include, kInvalidGlobal, 0};
      ++counters.remote_include;
      mark_around(x);
      exclude_set(dominated);
      return true;
    }
    const auto& d = deaths_[x];
    if (d.cause != GhostRemoval::local_proposal) {
      throw ProtocolError("proposal for ghost " + std::to_string(gx) + " that its owner already reduced");
    }
    const LocalId mine = lg.local(d.killer);
    DMWIS_ASSERT(lg.weight(mine) == weight,
                 "conflicting proposals " + std::to_string(d.killer) + " and " + std::to_string(gx) +
                     " have different weights");
    for (const auto& c : conflicts) {
      DMWIS_ASSERT(c.mine != d.killer, "proposal " + std::to_string(d.killer) + " in two conflicts");
    }
    conflicts.push_back({d.killer, gx, src, weight});
    ++counters.conflicts;
    if (src < rank()) lost = checked_add(lost, weight);
    return false;
  }

  // Ownership transfer of ghost x (moved by src, single neighbour s.neighbor owned here).
  bool on_move(const VertexStatus& s, Rank src) {
    const LocalId x = lg.local(s.v);
    if (lg.is_owned(x)) throw ProtocolError("move of vertex " + std::to_string(s.v) + " that is owned here");
    if (!lg.knows(s.neighbor) || lg.is_ghost(lg.local(s.neighbor))) {
      throw ProtocolError("move of " + std::to_string(s.v) + " names a neighbour not owned here");
    }
    const LocalId u = lg.local(s.neighbor);
    if (!lg.live(x)) {
      auto e = make_event(EventKind::void_move, x);
      e.peer = src;
      push_event(std::move(e));
      ++counters.void_moves;
      return false;
    }
    if (lg.state(u) == VertexState::moved_out) {
      auto it = moved_to.find(lg.global(u));
      DMWIS_ASSERT(it != moved_to.end() && it->second == src, "move race with an unexpected peer");
      // isolated edge {x,u}: both sides keep the heavier endpoint, ties to the smaller ID
      const bool u_wins = lg.weight(u) > s.weight || (lg.weight(u) == s.weight && lg.global(u) < s.v);
      lg.remove_ghost(x, GhostRemoval::move_race);
      deaths_[x] = {GhostRemoval::move_race, kInvalidGlobal, 0};
      moved_to.erase(it);
      if (u_wins) {
        lg.reinstate(u, VertexState::included);
        offset = checked_add(offset, lg.weight(u));
        push_event(make_event(EventKind::race_won, u));
      } else {
        push_event(make_event(EventKind::race_lost, u));
      }
      ++counters.move_races;
      return true;
    }
    lg.adopt(x, s.weight);
    auto e = make_event(EventKind::adopt, x);
    e.peer = src;
    push_event(std::move(e));
    ++counters.adopted;
    mark_around(x);
    return true;
  }

  bool receive(const Message& m) {
    return std::visit(
        [&](const auto& p) -> bool {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, WeightDecrease>) {
            return on_weight_decrease(p);
          } else if constexpr (std::is_same_v<T, VertexStatus>) {
            return on_status(p, m.src);
          } else {
            throw ProtocolError("unexpected solution status during reduction");
          }
        },
        m.payload);
  }

  // ---- outgoing messages ----------------------------------------------------------------

  // W_i: final weights of touched interface vertices that are still live or were moved.
  void send_weight_updates(Transport& t) {
    for (auto v : pending_weights) {
      in_w_[v] = 0;
      std::vector<Rank> recv;
      if (lg.live(v)) {
        recv = lg.recv(v);
      } else if (lg.state(v) == VertexState::moved_out) {
        auto it = moved_to.find(lg.global(v));
        if (it != moved_to.end()) recv = {it->second};
      }
      for (auto r : recv) t.send({rank(), r, WeightDecrease{lg.global(v), lg.weight(v)}});
    }
    pending_weights.clear();
  }

  // M_i in order, each to the PEs adjacent when the status was set.
  void send_statuses(Transport& t) {
    for (const auto& entry : pending_status) {
      if (entry.dropped) continue;
      for (auto r : entry.recv) t.send({rank(), r, entry.status});
    }
    pending_status.clear();
  }

  [[nodiscard]] bool has_pending_output() const {
    return !pending_weights.empty() || !pending_status.empty();
  }

  // ω_i(v) >= α(G_i[N_i(v)]) via the oracle, for neighbourhoods the oracle handles quickly.
  void check_proposal_precondition(LocalId v) const {
    auto nb = lg.live_neighbors(v);
    if (nb.size() > 20) return;
    DMWIS_ASSERT(lg.weight(v) >= solve_exact_weight(neighborhood_subproblem(nb)),
                 "proposal of " + std::to_string(lg.global(v)) + " violates the heavy-vertex bound");
  }

  [[nodiscard]] SubProblem neighborhood_subproblem(const std::vector<LocalId>& nb) const {
    SubProblem sp;
    for (auto u : nb) sp.vertices.push_back({lg.global(u), lg.weight(u)});
    for (std::uint32_t a = 0; a < nb.size(); ++a) {
      for (std::uint32_t b = a + 1; b < nb.size(); ++b) {
        if (lg.is_ghost(nb[a]) && lg.is_ghost(nb[b])) continue;
        if (lg.adjacent(nb[a], nb[b])) sp.edges.emplace_back(a, b);
      }
    }
    return sp;
  }

 private:
  std::vector<GhostDeath> deaths_;
  std::vector<std::uint8_t> in_w_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace dmwis
