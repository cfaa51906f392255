#include <gtest/gtest.h>

#include <map>
#include <random>

#include "dmwis/transport.hpp"

namespace dmwis {
namespace {

Message stamped(Rank src, Rank dst, GlobalId seq) { return {src, dst, WeightDecrease{seq, 1}}; }

GlobalId seq_of(const Message& m) { return std::get<WeightDecrease>(m.payload).v; }

TEST(Transport, ThresholdFlushesBoth) {
  Transport t(2, TransportMode::async, 2);
  t.send(stamped(0, 1, 0));
  EXPECT_TRUE(t.poll(1).empty());
  t.send(stamped(0, 1, 1));
  const auto got = t.poll(1);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(seq_of(got[0]), 0u);
  EXPECT_EQ(seq_of(got[1]), 1u);
  EXPECT_EQ(t.stats().flushes, 1u);
}

TEST(Transport, SyncNothingBeforeBarrier) {
  Transport t(2, TransportMode::sync);
  t.send(stamped(0, 1, 0));
  EXPECT_TRUE(t.poll(1).empty());
  const auto batches = t.exchange_barrier();
  ASSERT_EQ(batches[1].size(), 1u);
  EXPECT_TRUE(batches[0].empty());
}

TEST(Transport, PerLinkFifoUnderRandomTraffic) {
  for (auto mode : {TransportMode::sync, TransportMode::async}) {
    Transport t(4, mode, 3);
    std::mt19937_64 rng(5);
    std::map<std::pair<Rank, Rank>, std::vector<GlobalId>> sent, received;
    for (GlobalId s = 0; s < 100; ++s) {
      const Rank src = rng() % 4;
      const Rank dst = rng() % 4;
      t.send(stamped(src, dst, s));
      sent[{src, dst}].push_back(s);
    }
    std::vector<std::vector<Message>> batches(4);
    if (mode == TransportMode::sync) {
      batches = t.exchange_barrier();
    } else {
      t.flush_all();
      for (Rank i = 0; i < 4; ++i) batches[i] = t.poll(i);
    }
    for (Rank i = 0; i < 4; ++i) {
      for (const auto& m : batches[i]) {
        EXPECT_EQ(m.dst, i);
        received[{m.src, m.dst}].push_back(seq_of(m));
      }
    }
    EXPECT_EQ(sent, received);
  }
}

TEST(Transport, BarrierGroupsBySource) {
  Transport t(3, TransportMode::sync);
  t.send(stamped(2, 0, 0));
  t.send(stamped(1, 0, 1));
  t.send(stamped(2, 0, 2));
  const auto b = t.exchange_barrier();
  ASSERT_EQ(b[0].size(), 3u);
  EXPECT_EQ(b[0][0].src, 1u);
  EXPECT_EQ(b[0][1].src, 2u);
  EXPECT_EQ(seq_of(b[0][1]), 0u);
  EXPECT_EQ(seq_of(b[0][2]), 2u);
}

TEST(Transport, EmptyAndCrossExchange) {
  Transport t(2, TransportMode::sync);
  auto b = t.exchange_barrier();
  EXPECT_TRUE(b[0].empty());
  EXPECT_TRUE(b[1].empty());
  t.send(stamped(0, 1, 10));
  t.send(stamped(1, 0, 11));
  b = t.exchange_barrier();
  ASSERT_EQ(b[0].size(), 1u);
  ASSERT_EQ(b[1].size(), 1u);
  EXPECT_EQ(seq_of(b[0][0]), 11u);
  EXPECT_EQ(seq_of(b[1][0]), 10u);
}

TEST(Transport, Conservation) {
  Transport t(3, TransportMode::async, 4);
  std::mt19937_64 rng(1);
  for (GlobalId s = 0; s < 200; ++s) {
    const Rank src = rng() % 3;
    const Rank dst = rng() % 3;
    if (s % 3 == 0) {
      t.send({src, dst, SolutionStatus{s, true}});
    } else {
      t.send(stamped(src, dst, s));
    }
  }
  t.flush_all();
  for (Rank i = 0; i < 3; ++i) t.poll(i);
  const auto st = t.stats();
  EXPECT_EQ(st.sent, st.delivered);
  EXPECT_EQ(st.total_sent(), 200u);
  EXPECT_TRUE(t.idle());
}

TEST(Transport, PollEmptyAndFlushIdempotent) {
  Transport t(2, TransportMode::async, 10);
  EXPECT_TRUE(t.poll(0).empty());
  t.send(stamped(0, 1, 0));
  EXPECT_TRUE(t.poll(1).empty());
  EXPECT_FALSE(t.idle());
  t.flush_all();
  t.flush_all();
  EXPECT_EQ(t.poll(1).size(), 1u);
  EXPECT_TRUE(t.poll(1).empty());
}

TEST(Transport, RejectsMisuse) {
  EXPECT_THROW(Transport(0, TransportMode::sync), std::invalid_argument);
  EXPECT_THROW(Transport(2, TransportMode::async, 0), std::invalid_argument);
  Transport t(2, TransportMode::async);
  EXPECT_THROW(t.exchange_barrier(), ProtocolError);
  EXPECT_THROW(t.send(stamped(0, 2, 0)), ProtocolError);
}

TEST(Scheduler, ZeroWorkIsQuiescent) {
  Transport t(3, TransportMode::async);
  const auto rep = run_scheduler(
      t, [](Rank) { return false; }, [](Rank) { return false; }, 1);
  EXPECT_EQ(rep.steps, 0u);
}

// PE 0 and PE 1 bounce a counter k times; every hop is one message.
struct PingPong {
  Transport& t;
  GlobalId k;
  GlobalId last = 0;
  std::size_t hops = 0;
  bool started = false;

  bool step(Rank i) {
    bool did = false;
    if (i == 0 && !started) {
      started = true;
      t.send(stamped(0, 1, 1));
      did = true;
    }
    for (const auto& m : t.poll(i)) {
      const GlobalId c = seq_of(m);
      ++hops;
      last = c;
      if (c < k) t.send(stamped(i, 1 - i, c + 1));
      did = true;
    }
    t.flush(i);
    return did;
  }
};

TEST(Scheduler, PingPongTerminatesLinearly) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Transport t(2, TransportMode::async, 8);
    PingPong pp{t, 50};
    const auto rep = run_scheduler(
        t, [&](Rank i) { return pp.step(i); }, [&](Rank i) { return i == 0 && !pp.started; }, seed);
    EXPECT_EQ(pp.hops, 50u);
    EXPECT_EQ(pp.last, 50u);
    EXPECT_LE(rep.steps, 8u * 50u);
  }
}

TEST(Scheduler, SameSeedSameTrace) {
  auto run = [](std::uint64_t seed) {
    Transport t(2, TransportMode::async, 8);
    PingPong pp{t, 30};
    return run_scheduler(
               t, [&](Rank i) { return pp.step(i); }, [&](Rank i) { return i == 0 && !pp.started; }, seed)
        .trace_hash;
  };
  EXPECT_EQ(run(3), run(3));
  EXPECT_NE(run(3), run(4));
}

TEST(Scheduler, GuardStopsRunaway) {
  Transport t(1, TransportMode::async);
  EXPECT_THROW(run_scheduler(
                   t, [](Rank) { return true; }, [](Rank) { return true; }, 0, 100),
               ProtocolError);
}

TEST(ThreadedRunner, PingPongCompletes) {
  Transport t(2, TransportMode::async, 1);
  PingPong pp{t, 200};
  std::mutex mu;
  ThreadedRunner::run(t, [&](Rank i) {
    std::lock_guard lock(mu);
    return pp.step(i);
  });
  EXPECT_EQ(pp.hops, 200u);
  EXPECT_TRUE(t.idle());
}

}  // namespace
}  // namespace dmwis
