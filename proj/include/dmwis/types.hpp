#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dmwis {

using GlobalId = std::uint32_t;
using LocalId = std::uint32_t;
using Rank = std::uint32_t;
using Weight = std::uint64_t;

inline constexpr GlobalId kInvalidGlobal = std::numeric_limits<GlobalId>::max();
inline constexpr LocalId kInvalidLocal = std::numeric_limits<LocalId>::max();
inline constexpr Rank kInvalidRank = std::numeric_limits<Rank>::max();

// Malformed input: bad vertex IDs, negative weights, broken files.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed. Indicates a bug or a violated reduction model.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Inconsistent message traffic or event stacks between PEs.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail_invariant(const char* expr, const char* file, int line,
                                        const std::string& msg) {
  throw InvariantViolation(std::string(file) + ":" + std::to_string(line) + ": " + expr +
                           (msg.empty() ? std::string() : " (" + msg + ")"));
}

// Always-on invariant check. The expensive audits (oracle re-checks, model audit)
// are switched separately via ReductionConfig::debug_checks.
#define DMWIS_ASSERT(cond, msg)                                  \
  do {                                                           \
    if (!(cond)) ::dmwis::fail_invariant(#cond, __FILE__, __LINE__, (msg)); \
  } while (false)

inline Weight checked_add(Weight a, Weight b) {
  if (a > std::numeric_limits<Weight>::max() - b) {
    throw InvariantViolation("weight sum overflows 64 bit");
  }
  return a + b;
}

}  // namespace dmwis
