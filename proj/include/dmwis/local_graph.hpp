#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "dmwis/global_graph.hpp"
#include "dmwis/partition.hpp"
#include "dmwis/types.hpp"

namespace dmwis {

enum class VertexState : std::uint8_t {
  live,
  included,   // definitively in the solution (no live ghost neighbour at the time)
  proposed,   // interface vertex proposed for inclusion
  excluded,
  folded,
  moved_out,  // ownership handed to another PE
  ghost_removed,
};

// Why a ghost replica disappeared. Anything not listed here is outside the reduction model.
enum class GhostRemoval : std::uint8_t {
  local_proposal,   // a local neighbour was proposed for inclusion
  remote_exclude,   // the owner excluded it
  remote_include,   // the owner proposed it
  remote_peel,      // the owner peeled (excluded) it
  move_race,        // both endpoints of an isolated edge were moved towards each other
};

// Records border mutations and flags the ones the reduction model forbids.
struct ModelAudit {
  std::size_t border_mutations = 0;
  std::size_t violations = 0;
  std::vector<std::string> messages;

  void violation(std::string msg) {
    ++violations;
    if (messages.size() < 16) messages.push_back(std::move(msg));
  }
};

// PE-local view G_i: owned vertices, ghost replicas of remote interface vertices and all
// edges with at least one owned endpoint. Vertices are tombstoned, never compacted, so local
// IDs stay stable for the whole run. Owned vertices come first (ascending global ID), then
// ghosts (ascending global ID).
class LocalGraph {
 public:
  LocalGraph() = default;

  [[nodiscard]] Rank rank() const { return rank_; }
  [[nodiscard]] Rank num_pes() const { return num_pes_; }
  [[nodiscard]] std::size_t size() const { return global_of_.size(); }
  [[nodiscard]] std::size_t global_n() const { return local_of_.size(); }

  [[nodiscard]] GlobalId global(LocalId v) const { return global_of_[v]; }
  [[nodiscard]] LocalId local(GlobalId v) const { return local_of_[v]; }
  [[nodiscard]] bool knows(GlobalId v) const { return v < local_of_.size() && local_of_[v] != kInvalidLocal; }

  [[nodiscard]] bool is_ghost(LocalId v) const { return ghost_[v] != 0; }
  [[nodiscard]] bool is_owned(LocalId v) const { return ghost_[v] == 0; }
  [[nodiscard]] Rank owner(LocalId v) const { return owner_[v]; }
  [[nodiscard]] VertexState state(LocalId v) const { return state_[v]; }
  [[nodiscard]] bool live(LocalId v) const { return state_[v] == VertexState::live; }
  [[nodiscard]] bool live_owned(LocalId v) const { return live(v) && is_owned(v); }
  [[nodiscard]] Weight weight(LocalId v) const { return weight_[v]; }
  [[nodiscard]] std::size_t live_degree(LocalId v) const { return live_degree_[v]; }

  // Static superset of the neighbourhood; filter with live().
  [[nodiscard]] std::span<const LocalId> neighbors(LocalId v) const { return adj_[v]; }

  template <typename F>
  void for_each_live_neighbor(LocalId v, F&& f) const {
    for (auto u : adj_[v]) {
      if (live(u)) f(u);
    }
  }

  [[nodiscard]] std::vector<LocalId> live_neighbors(LocalId v) const {
    std::vector<LocalId> out;
    out.reserve(live_degree_[v]);
    for_each_live_neighbor(v, [&](LocalId u) { out.push_back(u); });
    return out;
  }

  [[nodiscard]] bool has_live_ghost_neighbor(LocalId v) const {
    for (auto u : adj_[v]) {
      if (live(u) && is_ghost(u)) return true;
    }
    return false;
  }

  // Live owned vertex with at least one live ghost neighbour.
  [[nodiscard]] bool is_interface(LocalId v) const {
    return live_owned(v) && has_live_ghost_neighbor(v);
  }

  // recv(v): PEs owning a live ghost neighbour of v, ascending.
  [[nodiscard]] std::vector<Rank> recv(LocalId v) const {
    std::vector<Rank> out;
    for (auto u : adj_[v]) {
      if (live(u) && is_ghost(u)) out.push_back(owner_[u]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // recv(v) in the unreduced input: every PE that holds a replica of v.
  [[nodiscard]] const std::vector<Rank>& initial_recv(LocalId v) const { return initial_recv_[v]; }

  [[nodiscard]] bool adjacent(LocalId u, LocalId v) const {
    // ghosts store only their local neighbourhood, so always scan from the owned side
    if (is_ghost(u)) std::swap(u, v);
    const auto& nb = adj_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  [[nodiscard]] std::size_t num_owned() const { return num_owned_initial_; }
  [[nodiscard]] std::size_t num_live_owned() const { return num_live_owned_; }

  [[nodiscard]] std::vector<LocalId> live_owned_vertices() const {
    std::vector<LocalId> out;
    for (LocalId v = 0; v < size(); ++v) {
      if (live_owned(v)) out.push_back(v);
    }
    return out;
  }

  // ω_i(S) over live members: exact weights for owned vertices, bounds for ghosts.
  template <typename Range>
  [[nodiscard]] Weight weight_of_set(const Range& vertices) const {
    Weight sum = 0;
    for (auto v : vertices) {
      if (v >= size()) throw GraphError("weight_of_set: unknown local vertex " + std::to_string(v));
      if (live(v)) sum = checked_add(sum, weight_[v]);
    }
    return sum;
  }

  [[nodiscard]] Weight live_neighborhood_weight(LocalId v) const {
    Weight sum = 0;
    for_each_live_neighbor(v, [&](LocalId u) { sum = checked_add(sum, weight_[u]); });
    return sum;
  }

  [[nodiscard]] const ModelAudit& audit() const { return audit_; }

  // ---- mutations; every border mutation is audited against the reduction model ----

  void set_weight(LocalId v, Weight w) {
    DMWIS_ASSERT(live_owned(v), "weight change on a non-live or ghost vertex");
    if (is_interface(v)) {
      ++audit_.border_mutations;
      if (w > weight_[v]) audit_.violation("weight increase of interface vertex " + std::to_string(global(v)));
    }
    weight_[v] = w;
  }

  void lower_ghost_bound(LocalId g, Weight w) {
    DMWIS_ASSERT(is_ghost(g), "ghost bound update on an owned vertex");
    ++audit_.border_mutations;
    if (w > weight_[g]) audit_.violation("ghost bound increase for " + std::to_string(global(g)));
    weight_[g] = w;
  }

  void remove_owned(LocalId v, VertexState reason) {
    DMWIS_ASSERT(live_owned(v), "removing a vertex that is not live and owned");
    DMWIS_ASSERT(reason != VertexState::live && reason != VertexState::ghost_removed, "bad removal state");
    if (has_live_ghost_neighbor(v)) {
      ++audit_.border_mutations;
      if (reason != VertexState::excluded && reason != VertexState::proposed &&
          reason != VertexState::moved_out) {
        audit_.violation("interface vertex " + std::to_string(global(v)) +
                         " removed neither by exclusion, proposal nor move");
      }
    }
    kill(v, reason);
    --num_live_owned_;
  }

  void remove_ghost(LocalId g, GhostRemoval cause) {
    DMWIS_ASSERT(is_ghost(g) && live(g), "removing a ghost that is not live");
    ++audit_.border_mutations;
    (void)cause;  // every GhostRemoval value is a model-legal cause
    kill(g, VertexState::ghost_removed);
  }

  // A moved vertex becomes owned by this PE with its exact weight.
  void adopt(LocalId g, Weight w) {
    DMWIS_ASSERT(is_ghost(g) && live(g), "adopting a ghost that is not live");
    ++audit_.border_mutations;
    ghost_[g] = 0;
    owner_[g] = rank_;
    weight_[g] = w;
    ++num_live_owned_;
  }

  // Marks an already-dead ghost that was moved here (and therefore is ours to report).
  void adopt_dead(LocalId g) {
    DMWIS_ASSERT(is_ghost(g) && !live(g), "adopt_dead on a live ghost");
    ghost_[g] = 0;
    owner_[g] = rank_;
    state_[g] = VertexState::excluded;
  }

  // A removed owned vertex changes its removal state (a handed-over vertex taken back).
  void reinstate(LocalId v, VertexState reason) {
    DMWIS_ASSERT(is_owned(v) && state_[v] == VertexState::moved_out, "reinstating a vertex that was not moved");
    DMWIS_ASSERT(reason == VertexState::included, "a taken-back vertex can only be included");
    state_[v] = reason;
  }

  void note_audit_violation(std::string msg) { audit_.violation(std::move(msg)); }

  friend LocalGraph localize(const GlobalGraph& g, const Partition& part, Rank i);

 private:
  void kill(LocalId v, VertexState reason) {
    state_[v] = reason;
    for (auto u : adj_[v]) {
      if (live(u)) --live_degree_[u];
    }
  }

  Rank rank_ = 0;
  Rank num_pes_ = 1;
  std::vector<GlobalId> global_of_;
  std::vector<LocalId> local_of_;
  std::vector<std::uint8_t> ghost_;
  std::vector<Rank> owner_;
  std::vector<Weight> weight_;
  std::vector<VertexState> state_;
  std::vector<std::uint32_t> live_degree_;
  std::vector<std::vector<LocalId>> adj_;
  std::vector<std::vector<Rank>> initial_recv_;
  std::size_t num_owned_initial_ = 0;
  std::size_t num_live_owned_ = 0;
  ModelAudit audit_;
};

inline LocalGraph localize(const GlobalGraph& g, const Partition& part, Rank i) {
  DMWIS_ASSERT(i < part.num_pes(), "rank outside partition");
  DMWIS_ASSERT(part.assignment.size() == g.n(), "partition does not match graph");
  LocalGraph lg;
  lg.rank_ = i;
  lg.num_pes_ = part.num_pes();
  lg.local_of_.assign(g.n(), kInvalidLocal);

  const auto& owned = part.blocks[i];
  std::vector<GlobalId> ghosts;
  for (auto v : owned) {
    for (auto u : g.neighbors(v)) {
      if (part.assignment[u] != i) ghosts.push_back(u);
    }
  }
  std::sort(ghosts.begin(), ghosts.end());
  ghosts.erase(std::unique(ghosts.begin(), ghosts.end()), ghosts.end());

  lg.global_of_.reserve(owned.size() + ghosts.size());
  for (auto v : owned) lg.global_of_.push_back(v);
  for (auto u : ghosts) lg.global_of_.push_back(u);
  for (LocalId l = 0; l < lg.global_of_.size(); ++l) lg.local_of_[lg.global_of_[l]] = l;

  const std::size_t size = lg.global_of_.size();
  lg.ghost_.assign(size, 0);
  lg.owner_.assign(size, i);
  lg.weight_.resize(size);
  lg.state_.assign(size, VertexState::live);
  lg.adj_.assign(size, {});
  lg.initial_recv_.assign(size, {});
  lg.live_degree_.assign(size, 0);
  lg.num_owned_initial_ = owned.size();
  lg.num_live_owned_ = owned.size();

  for (LocalId l = 0; l < size; ++l) {
    const GlobalId v = lg.global_of_[l];
    lg.weight_[l] = g.weight(v);
    if (l >= owned.size()) {
      lg.ghost_[l] = 1;
      lg.owner_[l] = part.assignment[v];
    }
  }
  for (LocalId l = 0; l < owned.size(); ++l) {
    const GlobalId v = lg.global_of_[l];
    for (auto u : g.neighbors(v)) {
      const LocalId lu = lg.local_of_[u];
      lg.adj_[l].push_back(lu);
      if (lg.ghost_[lu]) {
        lg.adj_[lu].push_back(l);
        lg.initial_recv_[l].push_back(part.assignment[u]);
      }
    }
    auto& r = lg.initial_recv_[l];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  for (LocalId l = 0; l < size; ++l) {
    std::sort(lg.adj_[l].begin(), lg.adj_[l].end());
    lg.live_degree_[l] = static_cast<std::uint32_t>(lg.adj_[l].size());
  }
  return lg;
}

}  // namespace dmwis
