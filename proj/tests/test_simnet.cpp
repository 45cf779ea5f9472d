#include <doctest.h>

#include <future>
#include <string>
#include <vector>

#include "bootsim/prng.hpp"
#include "bootsim/simnet.hpp"

using namespace bootsim;
using simnet::Channel;
using simnet::FabricLedger;
using simnet::ProcContext;

TEST_CASE("empty single-process program moves no bytes") {
  const FabricLedger ledger = simnet::fabric_run(1, [](ProcContext&) {});
  CHECK(ledger.total_bytes == 0);
  CHECK(ledger.bytes_by_link.empty());
  CHECK(ledger.per_process.size() == 1);
  CHECK(ledger.per_process[0].peak_floats == 0);
  CHECK(ledger.per_process[0].points == 0);
}

TEST_CASE("three floats cost twelve bytes on their link") {
  const FabricLedger ledger = simnet::fabric_run(2, [](ProcContext& ctx) {
    if (ctx.rank() == 1) {
      ctx.send(0, {1.0, 2.0, 3.0}, Channel::Data);
    } else {
      const auto payload = ctx.recv(1);
      CHECK(payload == std::vector<double>{1.0, 2.0, 3.0});
    }
  });
  CHECK(ledger.bytes_by_link.at({1, 0}) == 12);
  CHECK(ledger.total_bytes == 12);
  CHECK(ledger.channel_bytes(Channel::Data) == 12);
}

TEST_CASE("messages from one source arrive in send order") {
  const FabricLedger ledger = simnet::fabric_run(2, [](ProcContext& ctx) {
    if (ctx.rank() == 1) {
      ctx.send(0, {1.0}, Channel::Data);
      ctx.send(0, {2.0}, Channel::Data);
      ctx.send(0, {3.0}, Channel::Results);
    } else {
      CHECK(ctx.recv(1) == std::vector<double>{1.0});
      CHECK(ctx.recv(1) == std::vector<double>{2.0});
      CHECK(ctx.recv(1) == std::vector<double>{3.0});
    }
  });
  CHECK(ledger.channel_bytes(Channel::Data) == 8);
  CHECK(ledger.channel_bytes(Channel::Results) == 4);
}

TEST_CASE("empty payloads are delivered but cost nothing") {
  const FabricLedger ledger = simnet::fabric_run(2, [](ProcContext& ctx) {
    if (ctx.rank() == 0) {
      ctx.send(1, {}, Channel::Data);
    } else {
      CHECK(ctx.recv(0).empty());
    }
  });
  CHECK(ledger.total_bytes == 0);
}

TEST_CASE("channel splits divide one message's bytes") {
  const FabricLedger ledger = simnet::fabric_run(2, [](ProcContext& ctx) {
    if (ctx.rank() == 1) {
      ctx.send(0, {5.0, 100.0},
               {simnet::ChannelShare{Channel::Results, 1},
                simnet::ChannelShare{Channel::Verification, 1}});
    } else {
      ctx.recv(1);
    }
  });
  CHECK(ledger.channel_bytes(Channel::Results) == 4);
  CHECK(ledger.channel_bytes(Channel::Verification) == 4);
  CHECK(ledger.total_bytes == 8);
  CHECK(ledger.modeled_bytes() == 4);
}

TEST_CASE("a bad channel split is a protocol error") {
  CHECK_THROWS_AS(simnet::fabric_run(2,
                                     [](ProcContext& ctx) {
                                       if (ctx.rank() == 0) {
                                         ctx.send(1, {1.0, 2.0},
                                                  {simnet::ChannelShare{Channel::Data, 1}});
                                       } else {
                                         ctx.recv(0);
                                       }
                                     }),
                  ProtocolError);
}

TEST_CASE("mutual receives deadlock with a diagnostic naming both ranks") {
  try {
    simnet::fabric_run(2, [](ProcContext& ctx) { ctx.recv(1 - ctx.rank()); });
    FAIL("expected DeadlockError");
  } catch (const DeadlockError& err) {
    const std::string what = err.what();
    CHECK(what.find("rank 0") != std::string::npos);
    CHECK(what.find("rank 1") != std::string::npos);
    CHECK(what.find("waiting on") != std::string::npos);
  }
}

TEST_CASE("single rank blocking on itself is rejected") {
  CHECK_THROWS_AS(simnet::fabric_run(1, [](ProcContext& ctx) { ctx.recv(0); }), ProtocolError);
}

TEST_CASE("self-sends and invalid ranks are protocol errors") {
  CHECK_THROWS_AS(
      simnet::fabric_run(2, [](ProcContext& ctx) { ctx.send(ctx.rank(), {1.0}, Channel::Data); }),
      ProtocolError);
  CHECK_THROWS_AS(simnet::fabric_run(2,
                                     [](ProcContext& ctx) {
                                       if (ctx.rank() == 0) {
                                         ctx.send(5, {1.0}, Channel::Data);
                                       }
                                     }),
                  ProtocolError);
}

TEST_CASE("unconsumed messages at termination are a protocol error") {
  CHECK_THROWS_AS(simnet::fabric_run(2,
                                     [](ProcContext& ctx) {
                                       if (ctx.rank() == 1) {
                                         ctx.send(0, {1.0}, Channel::Data);
                                       }
                                     }),
                  ProtocolError);
}

TEST_CASE("memory accounting tracks the high-water mark") {
  const FabricLedger ledger = simnet::fabric_run(1, [](ProcContext& ctx) {
    ctx.alloc_floats(10'000);
    ctx.alloc_floats(2'500'000);
    ctx.free_floats(2'500'000);
    ctx.alloc_floats(0);  // no-op
    ctx.free_floats(10'000);
  });
  CHECK(ledger.per_process[0].peak_floats == 2'510'000);
}

TEST_CASE("freeing more than resident is an accounting error") {
  CHECK_THROWS_AS(simnet::fabric_run(1,
                                     [](ProcContext& ctx) {
                                       ctx.alloc_floats(5);
                                       ctx.free_floats(6);
                                     }),
                  AccountingError);
}

TEST_CASE("points accumulate per process") {
  const FabricLedger ledger = simnet::fabric_run(2, [](ProcContext& ctx) {
    ctx.add_points(10);
    if (ctx.rank() == 1) {
      ctx.add_points(5);
    }
  });
  CHECK(ledger.per_process[0].points == 10);
  CHECK(ledger.per_process[1].points == 15);
}

namespace {

// Ring exchange: every rank sends a seeded number of payloads to its right
// neighbor and drains the same count from its left. Exercises conservation.
simnet::RankProgram ring_program(int p, std::uint64_t seed) {
  return [p, seed](ProcContext& ctx) {
    const int right = (ctx.rank() + 1) % p;
    const int left = (ctx.rank() + p - 1) % p;
    prng::RngState s = prng::rank_substream(seed, static_cast<std::uint64_t>(ctx.rank()));
    const std::uint64_t rounds = 1 + prng::draw_index(s, 5);
    ctx.send(right, {static_cast<double>(rounds)}, Channel::Data);
    for (std::uint64_t i = 0; i < rounds; ++i) {
      std::vector<double> payload(prng::draw_index(s, 7), 1.5);
      ctx.send(right, std::move(payload), Channel::Results);
    }
    const auto header = ctx.recv(left);
    const auto incoming = static_cast<std::uint64_t>(header[0]);
    for (std::uint64_t i = 0; i < incoming; ++i) {
      ctx.recv(left);
    }
  };
}

}  // namespace

TEST_CASE("conservation: total bytes equal the sum over links") {
  for (const int p : {2, 3, 5, 8}) {
    const FabricLedger ledger = simnet::fabric_run(p, ring_program(p, 31337));
    std::uint64_t link_sum = 0;
    for (const auto& [link, bytes] : ledger.bytes_by_link) {
      link_sum += bytes;
    }
    CHECK(ledger.total_bytes == link_sum);
    std::uint64_t channel_sum = 0;
    for (const std::uint64_t bytes : ledger.bytes_by_channel) {
      channel_sum += bytes;
    }
    CHECK(ledger.total_bytes == channel_sum);
  }
}

TEST_CASE("identical programs produce identical ledgers") {
  const auto run = [] { return simnet::fabric_run(5, ring_program(5, 205)); };
  const FabricLedger a = run();
  const FabricLedger b = run();
  CHECK(a.total_bytes == b.total_bytes);
  CHECK(a.bytes_by_link == b.bytes_by_link);
  CHECK(a.bytes_by_channel == b.bytes_by_channel);
}

TEST_CASE("independent fabrics can run concurrently") {
  auto fa = std::async(std::launch::async,
                       [] { return simnet::fabric_run(4, ring_program(4, 1)); });
  auto fb = std::async(std::launch::async,
                       [] { return simnet::fabric_run(4, ring_program(4, 1)); });
  const FabricLedger a = fa.get();
  const FabricLedger b = fb.get();
  CHECK(a.bytes_by_link == b.bytes_by_link);
  CHECK(a.total_bytes == b.total_bytes);
}

TEST_CASE("errors inside a rank program abort the run cleanly") {
  CHECK_THROWS_AS(simnet::fabric_run(3,
                                     [](ProcContext& ctx) {
                                       if (ctx.rank() == 1) {
                                         throw DomainError("boom");
                                       }
                                       if (ctx.rank() == 2) {
                                         ctx.recv(0);  // would block forever
                                       }
                                     }),
                  DomainError);
}

TEST_CASE("fabric_run validates its arguments") {
  CHECK_THROWS_AS(simnet::fabric_run(0, [](ProcContext&) {}), ConfigError);
  CHECK_THROWS_AS(simnet::fabric_run(2, simnet::RankProgram{}), ConfigError);
}
