#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "bootsim/errors.hpp"

namespace bootsim::simnet {

using Rank = int;

// Accounting channels. Wire bytes are always 4 x payload length; channels
// separate modeled data movement from protocol-verification traffic, which
// the cost formulas do not count.
enum class Channel { Data = 0, Results = 1, Verification = 2 };

inline constexpr std::size_t kNumChannels = 3;

std::string_view channel_name(Channel channel);

// Portion of one message's floats attributed to a channel. The shares of a
// send must sum to the payload length.
struct ChannelShare {
  Channel channel;
  std::uint64_t floats;
};

struct Message {
  Rank source = -1;
  Rank dest = -1;
  std::vector<double> payload;

  std::uint64_t accounted_bytes() const { return 4 * payload.size(); }
};

struct PerProcessStats {
  std::uint64_t peak_floats = 0;
  std::uint64_t points = 0;
};

// Byte counters per directed link and per channel, plus per-process peak
// float counts and sample-point counters. All counters are monotone while a
// fabric runs; total_bytes is the sum over links.
struct FabricLedger {
  std::map<std::pair<Rank, Rank>, std::uint64_t> bytes_by_link;
  std::array<std::uint64_t, kNumChannels> bytes_by_channel{};
  std::uint64_t total_bytes = 0;
  std::vector<PerProcessStats> per_process;

  std::uint64_t channel_bytes(Channel channel) const {
    return bytes_by_channel[static_cast<std::size_t>(channel)];
  }

  // Data plus results: the volume the closed-form cost models price.
  std::uint64_t modeled_bytes() const {
    return channel_bytes(Channel::Data) + channel_bytes(Channel::Results);
  }
};

class Fabric;

// Handle a rank program uses to talk to the fabric. Only valid inside
// fabric_run, on the virtual process it was handed to.
class ProcContext {
 public:
  Rank rank() const { return rank_; }
  int world_size() const;

  // Enqueues a message and credits 4 x payload-length bytes on the link.
  // Self-sends and invalid ranks are protocol errors.
  void send(Rank to, std::vector<double> payload, Channel channel);
  void send(Rank to, std::vector<double> payload, std::initializer_list<ChannelShare> split);

  // Blocks (yields to the scheduler) until a message from the given source is
  // available; per-link delivery is FIFO.
  std::vector<double> recv(Rank from);

  // Memory accounting in 4-byte float units. Only what a strategy declares is
  // counted: dataset floats, resample buffers, per-sample scratch.
  void alloc_floats(std::uint64_t n);
  void free_floats(std::uint64_t n);

  // Computation accounting: one point per resampling draw or index-range check.
  void add_points(std::uint64_t n);

 private:
  friend class Fabric;
  ProcContext(Fabric& fabric, Rank rank) : fabric_(&fabric), rank_(rank) {}

  Fabric* fabric_;
  Rank rank_;
};

using RankProgram = std::function<void(ProcContext&)>;

// Runs one copy of the program per rank under a deterministic cooperative
// schedule: a process runs until it blocks or finishes, and the next runnable
// rank is picked in ascending cyclic order. The result is independent of host
// thread scheduling. Throws DeadlockError when every live rank is blocked and
// ProtocolError when messages are left unconsumed at termination.
FabricLedger fabric_run(int num_processes, const RankProgram& program);

}  // namespace bootsim::simnet
