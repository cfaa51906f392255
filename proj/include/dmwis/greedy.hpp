#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dmwis/local_graph.hpp"
#include "dmwis/transport.hpp"
#include "dmwis/types.hpp"

namespace dmwis {

// Decisions of the greedy on the live part of each PE's local graph.
struct GreedyResult {
  std::vector<std::vector<GlobalId>> selected;  // per PE, owned vertices in the set, ascending
  Weight weight = 0;                            // with the owners' current weights
  std::size_t rounds = 0;
  TransportStats messages;
};

namespace detail {

// Distributed Luby-style greedy on one PE. A vertex joins the set once its key
// (weight, lower owner rank, lower ID) beats every undecided live neighbour.
class GreedyPe {
 public:
  enum Status : std::uint8_t { undecided, in, out, absent };

  explicit GreedyPe(const LocalGraph& lg) : lg_(&lg), status_(lg.size(), absent), weight_(lg.size(), 0) {
    for (LocalId v = 0; v < lg.size(); ++v) {
      if (lg.live(v)) {
        status_[v] = undecided;
        weight_[v] = lg.weight(v);
      }
    }
  }

  // Ghost bounds may overestimate; the owners broadcast exact weights first.
  void send_weights(Transport& t) const {
    for (auto v : lg_->live_owned_vertices()) {
      for (auto r : lg_->recv(v)) t.send({lg_->rank(), r, WeightDecrease{lg_->global(v), weight_[v]}});
    }
  }

  bool receive(const Message& m) {
    if (const auto* w = std::get_if<WeightDecrease>(&m.payload)) {
      const LocalId x = local_ghost(w->v);
      weight_[x] = w->weight;
      return true;
    }
    const auto* s = std::get_if<SolutionStatus>(&m.payload);
    if (s == nullptr) throw ProtocolError("unexpected reduction message during greedy");
    const LocalId x = local_ghost(s->v);
    if (status_[x] == absent) return false;
    if (status_[x] != undecided) {
      // a ghost dominated by a local selection may be reported out by its owner later
      if (s->in || status_[x] != out) throw ProtocolError("conflicting greedy decisions for " + std::to_string(s->v));
      return false;
    }
    status_[x] = s->in ? in : out;
    if (s->in) {
      for (auto u : lg_->neighbors(x)) {
        if (status_[u] == undecided) decide(u, false);
      }
    }
    return true;
  }

  // Selects every local maximum, repeatedly, until none is left. Returns whether any decision was made.
  bool select(bool repeat) {
    bool any = false;
    for (bool again = true; again;) {
      again = false;
      std::vector<LocalId> chosen;
      for (auto v : owned_) {
        if (status_[v] == undecided && is_local_max(v)) chosen.push_back(v);
      }
      for (auto v : chosen) {
        if (status_[v] != undecided) continue;
        decide(v, true);
        for (auto u : lg_->neighbors(v)) {
          if (status_[u] == undecided) decide(u, false);
        }
        any = true;
        again = repeat;
      }
    }
    return any;
  }

  void send_decisions(Transport& t) {
    for (auto [v, is_in] : outbox_) {
      for (auto r : lg_->recv(v)) t.send({lg_->rank(), r, SolutionStatus{lg_->global(v), is_in}});
    }
    outbox_.clear();
  }

  void init_owned() {
    for (auto v : lg_->live_owned_vertices()) owned_.push_back(v);
  }

  [[nodiscard]] bool has_undecided() const {
    return std::any_of(owned_.begin(), owned_.end(), [&](LocalId v) { return status_[v] == undecided; });
  }
  [[nodiscard]] bool has_outbox() const { return !outbox_.empty(); }

  void collect(std::vector<GlobalId>& out, Weight& weight) const {
    for (auto v : owned_) {
      if (status_[v] == in) {
        out.push_back(lg_->global(v));
        weight = checked_add(weight, weight_[v]);
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  [[nodiscard]] LocalId local_ghost(GlobalId v) const {
    if (!lg_->knows(v) || !lg_->is_ghost(lg_->local(v))) {
      throw ProtocolError("greedy message for " + std::to_string(v) + " which is not a ghost here");
    }
    return lg_->local(v);
  }

  [[nodiscard]] bool beats(LocalId a, LocalId b) const {
    if (weight_[a] != weight_[b]) return weight_[a] > weight_[b];
    if (lg_->owner(a) != lg_->owner(b)) return lg_->owner(a) < lg_->owner(b);
    return lg_->global(a) < lg_->global(b);
  }

  [[nodiscard]] bool is_local_max(LocalId v) const {
    for (auto u : lg_->neighbors(v)) {
      if (status_[u] == undecided && beats(u, v)) return false;
    }
    return true;
  }

  void decide(LocalId v, bool is_in) {
    status_[v] = is_in ? in : out;
    if (lg_->is_owned(v) && lg_->is_interface(v)) outbox_.emplace_back(v, is_in);
  }

  const LocalGraph* lg_;
  std::vector<Status> status_;
  std::vector<Weight> weight_;
  std::vector<LocalId> owned_;
  std::vector<std::pair<LocalId, bool>> outbox_;
};

}  // namespace detail

// Maximal independent set of the live vertices of the given local graphs.
inline GreedyResult greedy_luby(const std::vector<const LocalGraph*>& graphs, TransportMode mode,
                                std::uint64_t seed = 0, std::size_t buffer_threshold = 1024) {
  const auto p = static_cast<Rank>(graphs.size());
  Transport t(p, mode, buffer_threshold);
  std::vector<detail::GreedyPe> pes;
  pes.reserve(p);
  for (auto* lg : graphs) {
    pes.emplace_back(*lg);
    pes.back().init_owned();
  }
  GreedyResult res;
  for (auto& pe : pes) pe.send_weights(t);

  if (mode == TransportMode::sync) {
    auto batches = t.exchange_barrier();
    for (Rank i = 0; i < p; ++i) {
      for (const auto& m : batches[i]) pes[i].receive(m);
    }
    while (true) {
      bool progress = false;
      for (auto& pe : pes) progress = pe.select(false) || progress;
      for (auto& pe : pes) pe.send_decisions(t);
      batches = t.exchange_barrier();
      for (Rank i = 0; i < p; ++i) {
        for (const auto& m : batches[i]) progress = pes[i].receive(m) || progress;
      }
      if (!progress) break;
      ++res.rounds;
    }
  } else {
    // weights first so that no PE selects against a stale ghost bound
    t.flush_all();
    for (Rank i = 0; i < p; ++i) {
      for (const auto& m : t.poll(i)) pes[i].receive(m);
    }
    std::vector<std::uint8_t> pending(p, 1);
    const StepFn step = [&](Rank i) {
      bool did = false;
      for (const auto& m : t.poll(i)) did = pes[i].receive(m) || did;
      did = pes[i].select(true) || did;
      pes[i].send_decisions(t);
      t.flush(i);
      pending[i] = 0;
      return did;
    };
    const HasWorkFn has_work = [&](Rank i) { return pending[i] != 0; };
    res.rounds = run_scheduler(t, step, has_work, seed).progress_rounds;
  }

  res.selected.resize(p);
  for (Rank i = 0; i < p; ++i) {
    if (pes[i].has_undecided()) throw ProtocolError("greedy stopped with undecided vertices on PE " + std::to_string(i));
    pes[i].collect(res.selected[i], res.weight);
  }
  res.messages = t.stats();
  return res;
}

}  // namespace dmwis
