#pragma once

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "dmwis/types.hpp"

namespace dmwis {

enum class StatusKind : std::uint8_t { excluded, moved, proposed };

inline const char* to_string(StatusKind s) {
  switch (s) {
    case StatusKind::excluded: return "excluded";
    case StatusKind::moved: return "moved";
    case StatusKind::proposed: return "proposed";
  }
  return "?";
}

struct WeightDecrease {
  GlobalId v = 0;
  Weight weight = 0;
};

// Border status of an interface vertex. `weight` is the sender's exact weight (moves carry it
// for adoption, proposals for the conflict check); `neighbor` is the single neighbour of a
// moved vertex; a non-zero `peel_phase` marks an exclusion made by peeling.
struct VertexStatus {
  GlobalId v = 0;
  StatusKind status = StatusKind::excluded;
  Weight weight = 0;
  GlobalId neighbor = kInvalidGlobal;
  std::uint32_t peel_phase = 0;
};

// Final in/out decision for a vertex, exchanged by the solvers and by reconstruction.
struct SolutionStatus {
  GlobalId v = 0;
  bool in = false;
};

using Payload = std::variant<WeightDecrease, VertexStatus, SolutionStatus>;

inline constexpr std::size_t kPayloadKinds = std::variant_size_v<Payload>;

struct Message {
  Rank src = 0;
  Rank dst = 0;
  Payload payload;
};

enum class TransportMode { sync, async };

struct TransportStats {
  std::array<std::uint64_t, kPayloadKinds> sent{};
  std::array<std::uint64_t, kPayloadKinds> delivered{};
  std::uint64_t bytes = 0;
  std::uint64_t flushes = 0;
  std::uint64_t barriers = 0;

  [[nodiscard]] std::uint64_t total_sent() const {
    std::uint64_t s = 0;
    for (auto x : sent) s += x;
    return s;
  }
  [[nodiscard]] std::uint64_t total_delivered() const {
    std::uint64_t s = 0;
    for (auto x : delivered) s += x;
    return s;
  }
};

inline std::size_t payload_bytes(const Payload& p) {
  return std::visit([](const auto& x) { return sizeof(x); }, p);
}

// In-process message transport between p PEs with FIFO links.
//
// sync:  send() stages messages; exchange_barrier() delivers everything at once.
// async: send() appends to a per-(src,dst) buffer that is flushed into the receiver's mailbox
//        once it holds `buffer_threshold` messages or when flushed explicitly; poll() drains.
//
// All public members are thread-safe so that PEs may run on their own threads.
class Transport {
 public:
  Transport(Rank p, TransportMode mode, std::size_t buffer_threshold = 1024)
      : p_(p), mode_(mode), threshold_(buffer_threshold), buffers_(std::size_t{p} * p), mailboxes_(p) {
    if (p == 0) throw std::invalid_argument("transport needs at least one PE");
    if (threshold_ == 0) throw std::invalid_argument("buffer threshold must be at least 1");
  }

  [[nodiscard]] Rank num_pes() const { return p_; }
  [[nodiscard]] TransportMode mode() const { return mode_; }
  [[nodiscard]] std::size_t buffer_threshold() const { return threshold_; }

  void send(Message m) {
    if (m.dst >= p_ || m.src >= p_) throw ProtocolError("message rank out of range");
    std::lock_guard lock(mutex_);
    ++stats_.sent[m.payload.index()];
    stats_.bytes += payload_bytes(m.payload);
    auto& buf = buffers_[link(m.src, m.dst)];
    buf.push_back(std::move(m));
    if (mode_ == TransportMode::async && buf.size() >= threshold_) flush_link_locked(buf);
  }

  // Sync mode: deliver all staged messages. Result[i] holds PE i's messages grouped by source
  // rank (ascending), each group in send order.
  std::vector<std::vector<Message>> exchange_barrier() {
    if (mode_ != TransportMode::sync) throw ProtocolError("exchange_barrier called in async mode");
    std::lock_guard lock(mutex_);
    ++stats_.barriers;
    std::vector<std::vector<Message>> out(p_);
    for (Rank dst = 0; dst < p_; ++dst) {
      for (Rank src = 0; src < p_; ++src) {
        auto& buf = buffers_[link(src, dst)];
        for (auto& m : buf) {
          ++stats_.delivered[m.payload.index()];
          out[dst].push_back(std::move(m));
        }
        buf.clear();
      }
    }
    return out;
  }

  // Async mode: push every buffered message of `src` into the mailboxes.
  void flush(Rank src) {
    std::lock_guard lock(mutex_);
    if (mode_ != TransportMode::async) return;
    for (Rank dst = 0; dst < p_; ++dst) flush_link_locked(buffers_[link(src, dst)]);
  }

  void flush_all() {
    for (Rank src = 0; src < p_; ++src) flush(src);
  }

  std::vector<Message> poll(Rank i) {
    std::lock_guard lock(mutex_);
    std::vector<Message> out(std::make_move_iterator(mailboxes_[i].begin()),
                             std::make_move_iterator(mailboxes_[i].end()));
    mailboxes_[i].clear();
    for (const auto& m : out) ++stats_.delivered[m.payload.index()];
    return out;
  }

  [[nodiscard]] bool has_mail(Rank i) const {
    std::lock_guard lock(mutex_);
    return !mailboxes_[i].empty();
  }

  // No staged, buffered or undelivered message anywhere.
  [[nodiscard]] bool idle() const {
    std::lock_guard lock(mutex_);
    for (const auto& b : buffers_) {
      if (!b.empty()) return false;
    }
    for (const auto& mb : mailboxes_) {
      if (!mb.empty()) return false;
    }
    return true;
  }

  [[nodiscard]] TransportStats stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
  }

  // Called (with no transport lock held) after a flush delivered messages to a mailbox.
  void set_delivery_hook(std::function<void()> hook) { hook_ = std::move(hook); }

 private:
  [[nodiscard]] std::size_t link(Rank src, Rank dst) const { return std::size_t{src} * p_ + dst; }

  void flush_link_locked(std::vector<Message>& buf) {
    if (buf.empty()) return;
    ++stats_.flushes;
    const Rank dst = buf.front().dst;
    for (auto& m : buf) mailboxes_[dst].push_back(std::move(m));
    buf.clear();
    if (hook_) pending_hook_ = true;
  }

  Rank p_;
  TransportMode mode_;
  std::size_t threshold_;
  mutable std::mutex mutex_;
  std::vector<std::vector<Message>> buffers_;
  std::vector<std::deque<Message>> mailboxes_;
  TransportStats stats_;
  std::function<void()> hook_;
  bool pending_hook_ = false;


 public:
  // Runs the delivery hook if a flush happened since the last call.
  void notify_deliveries() {
    bool fire = false;
    {
      std::lock_guard lock(mutex_);
      fire = pending_hook_;
      pending_hook_ = false;
    }
    if (fire && hook_) hook_();
  }
};

struct SchedulerReport {
  std::size_t steps = 0;
  std::size_t rounds = 0;
  std::size_t progress_rounds = 0;  // rounds in which at least one PE made progress
  std::uint64_t trace_hash = 0;
};

using StepFn = std::function<bool(Rank)>;      // one unit of PE work; true if anything happened
using HasWorkFn = std::function<bool(Rank)>;   // PE has local work pending (excluding mail)

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h ^ (x * 0xff51afd7ed558ccdULL);
}

// Deterministic single-threaded driver for async mode. Each round visits the PEs in rank order
// and skips a PE with probability 1/4 (seeded); stops at quiescence: no PE has local work and no
// message is buffered or waiting in a mailbox.
inline SchedulerReport run_scheduler(Transport& t, const StepFn& step, const HasWorkFn& has_work,
                                     std::uint64_t seed, std::size_t max_steps = 10'000'000) {
  SchedulerReport rep;
  std::mt19937_64 rng(seed);
  const Rank p = t.num_pes();
  auto quiescent = [&] {
    for (Rank i = 0; i < p; ++i) {
      if (has_work(i)) return false;
    }
    return t.idle();
  };
  while (!quiescent()) {
    bool any = false;
    for (Rank i = 0; i < p; ++i) {
      if (rng() % 4 == 0) continue;
      if (rep.steps >= max_steps) {
        throw ProtocolError("scheduler did not reach quiescence within " + std::to_string(max_steps) +
                            " steps");
      }
      ++rep.steps;
      const bool progressed = step(i);
      any = any || progressed;
      rep.trace_hash = hash_combine(rep.trace_hash, (std::uint64_t{i} << 1) | (progressed ? 1 : 0));
    }
    ++rep.rounds;
    if (any) ++rep.progress_rounds;
  }
  return rep;
}

// Runs every PE on its own thread; the mailboxes are the only shared structure. Terminates when
// all PEs are idle and the transport holds no message. Not deterministic.
class ThreadedRunner {
 public:
  static SchedulerReport run(Transport& t, const StepFn& step) {
    const Rank p = t.num_pes();
    std::mutex m;
    std::condition_variable cv;
    Rank idle = 0;
    bool done = false;
    std::atomic<std::size_t> steps{0};
    t.set_delivery_hook([&] {
      std::lock_guard lock(m);
      cv.notify_all();
    });
    std::vector<std::exception_ptr> errors(p);
    auto worker = [&](Rank i) {
      try {
        while (true) {
          ++steps;
          const bool did = step(i);
          t.notify_deliveries();
          if (did) continue;
          std::unique_lock lock(m);
          ++idle;
          while (!done && !t.has_mail(i)) {
            if (idle == p && t.idle()) {
              done = true;
              cv.notify_all();
              break;
            }
            cv.wait(lock);
          }
          if (done) return;
          --idle;
        }
      } catch (...) {
        errors[i] = std::current_exception();
        std::lock_guard lock(m);
        done = true;
        cv.notify_all();
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(p);
    for (Rank i = 0; i < p; ++i) threads.emplace_back(worker, i);
    for (auto& th : threads) th.join();
    t.set_delivery_hook({});
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    SchedulerReport rep;
    rep.steps = steps.load();
    return rep;
  }
};

}  // namespace dmwis
