#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dmwis/types.hpp"

namespace dmwis {

enum class EventKind : std::uint8_t {
  include,           // pivot enters I; removed are out
  include_proposal,  // interface pivot proposed; removed are out, ghosts were dropped locally
  exclude,           // removed are out
  degree_one_fold,   // pivot in I iff depends[0] not in I
  swt_fold,          // pivot in I iff no member of depends in I; removed are out
  move,              // pivot handed to peer; peer decides it
  adopt,             // pivot received from peer
  void_move,         // pivot arrived from peer but was already reduced here; out
  race_won,          // isolated-edge move race: pivot in I
  race_lost,         // isolated-edge move race: pivot out
  peel,              // pivot in I iff no member of depends in I (re-insertion)
};

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::include: return "include";
    case EventKind::include_proposal: return "include_proposal";
    case EventKind::exclude: return "exclude";
    case EventKind::degree_one_fold: return "degree_one_fold";
    case EventKind::swt_fold: return "swt_fold";
    case EventKind::move: return "move";
    case EventKind::adopt: return "adopt";
    case EventKind::void_move: return "void_move";
    case EventKind::race_won: return "race_won";
    case EventKind::race_lost: return "race_lost";
    case EventKind::peel: return "peel";
  }
  return "?";
}

struct WeightDelta {
  GlobalId v = 0;
  Weight old_weight = 0;
  Weight new_weight = 0;
};

// One entry of a PE's reconstruction stack. All vertex references are global IDs.
struct ReductionEvent {
  EventKind kind = EventKind::exclude;
  GlobalId pivot = kInvalidGlobal;
  Weight pivot_weight = 0;
  std::vector<GlobalId> removed;
  std::vector<GlobalId> ghosts;   // ghost neighbours dropped by a proposal
  std::vector<GlobalId> depends;  // vertices whose final status decides the pivot
  std::vector<WeightDelta> weight_deltas;
  std::vector<Rank> recv;  // adjacent PEs of a proposal when it was made
  Rank peer = kInvalidRank;
  std::uint32_t phase = 0;  // peel phase, 1-based
  std::uint64_t seq = 0;
};

}  // namespace dmwis
