#include "bootsim/simnet.hpp"

#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace bootsim::simnet {

std::string_view channel_name(Channel channel) {
  switch (channel) {
    case Channel::Data:
      return "data";
    case Channel::Results:
      return "results";
    case Channel::Verification:
      return "verification";
  }
  return "unknown";
}

namespace {
// Thrown inside a virtual process to unwind its stack when the run aborts.
struct AbortToken {};
}  // namespace

// Each virtual process runs on its own host thread, but a baton (active_)
// guarantees at most one of them executes at a time. Every baton transfer
// goes through mu_, which also makes unlocked mutations of inboxes and
// counters by the baton holder visible to the next holder.
class Fabric {
 public:
  Fabric(int num_processes, const RankProgram& program)
      : program_(program), procs_(static_cast<std::size_t>(num_processes)) {
    for (auto& proc : procs_) {
      proc = std::make_unique<Proc>();
    }
  }

  ~Fabric() {
    for (auto& proc : procs_) {
      if (proc->thread.joinable()) {
        proc->thread.join();
      }
    }
  }

  int world_size() const { return static_cast<int>(procs_.size()); }

  FabricLedger run() {
    for (Rank r = 0; r < world_size(); ++r) {
      procs_[static_cast<std::size_t>(r)]->thread = std::thread(&Fabric::thread_main, this, r);
    }

    std::exception_ptr failure;
    {
      std::unique_lock lock(mu_);
      Rank cursor = world_size() - 1;
      for (;;) {
        const Rank next = pick_next(cursor);
        if (next == kNobody) {
          break;  // all done
        }
        if (next == kDeadlocked) {
          failure = std::make_exception_ptr(DeadlockError(describe_deadlock()));
          break;
        }
        cursor = next;
        active_ = next;
        cv_.notify_all();
        cv_.wait(lock, [this] { return active_ == kScheduler; });
        if (procs_[static_cast<std::size_t>(next)]->error) {
          failure = procs_[static_cast<std::size_t>(next)]->error;
          break;
        }
      }
      if (failure) {
        aborting_ = true;
        cv_.notify_all();
      }
    }

    for (auto& proc : procs_) {
      proc->thread.join();
    }
    if (failure) {
      std::rethrow_exception(failure);
    }

    check_all_consumed();
    ledger_.per_process.reserve(procs_.size());
    for (const auto& proc : procs_) {
      ledger_.per_process.push_back(PerProcessStats{proc->floats_peak, proc->points});
    }
    return std::move(ledger_);
  }

  // --- operations invoked by the baton-holding virtual process ---

  void do_send(Rank from, Rank to, std::vector<double> payload,
               std::initializer_list<ChannelShare> split) {
    if (to == from) {
      throw ProtocolError("send: rank " + std::to_string(from) + " sending to itself");
    }
    if (to < 0 || to >= world_size()) {
      throw ProtocolError("send: destination rank " + std::to_string(to) + " out of range");
    }
    std::uint64_t split_total = 0;
    for (const ChannelShare& share : split) {
      split_total += share.floats;
    }
    if (split_total != payload.size()) {
      throw ProtocolError("send: channel shares cover " + std::to_string(split_total) +
                          " floats for a payload of " + std::to_string(payload.size()));
    }
    const std::uint64_t bytes = 4 * payload.size();
    ledger_.bytes_by_link[{from, to}] += bytes;
    ledger_.total_bytes += bytes;
    for (const ChannelShare& share : split) {
      ledger_.bytes_by_channel[static_cast<std::size_t>(share.channel)] += 4 * share.floats;
    }
    Proc& dest = *procs_[static_cast<std::size_t>(to)];
    dest.inbox[from].push_back(Message{from, to, std::move(payload)});
  }

  std::vector<double> do_recv(Rank at, Rank from) {
    if (from == at) {
      throw ProtocolError("recv: rank " + std::to_string(at) + " receiving from itself");
    }
    if (from < 0 || from >= world_size()) {
      throw ProtocolError("recv: source rank " + std::to_string(from) + " out of range");
    }
    Proc& self = *procs_[static_cast<std::size_t>(at)];
    std::unique_lock lock(mu_);
    for (;;) {
      auto it = self.inbox.find(from);
      if (it != self.inbox.end() && !it->second.empty()) {
        std::vector<double> payload = std::move(it->second.front().payload);
        it->second.pop_front();
        self.state = Proc::State::Ready;
        self.waiting_on = kNobody;
        return payload;
      }
      self.state = Proc::State::Blocked;
      self.waiting_on = from;
      active_ = kScheduler;
      cv_.notify_all();
      cv_.wait(lock, [&] { return active_ == at || aborting_; });
      if (aborting_) {
        throw AbortToken{};
      }
    }
  }

  void do_alloc(Rank at, std::uint64_t n) {
    Proc& self = *procs_[static_cast<std::size_t>(at)];
    self.floats_resident += n;
    if (self.floats_resident > self.floats_peak) {
      self.floats_peak = self.floats_resident;
    }
  }

  void do_free(Rank at, std::uint64_t n) {
    Proc& self = *procs_[static_cast<std::size_t>(at)];
    if (n > self.floats_resident) {
      throw AccountingError("free_floats: rank " + std::to_string(at) + " freeing " +
                            std::to_string(n) + " floats with only " +
                            std::to_string(self.floats_resident) + " resident");
    }
    self.floats_resident -= n;
  }

  void do_points(Rank at, std::uint64_t n) { procs_[static_cast<std::size_t>(at)]->points += n; }

 private:
  static constexpr Rank kScheduler = -1;
  static constexpr Rank kNobody = -2;
  static constexpr Rank kDeadlocked = -3;

  struct Proc {
    enum class State { Ready, Blocked, Done };

    State state = State::Ready;
    Rank waiting_on = kNobody;
    std::map<Rank, std::deque<Message>> inbox;
    std::uint64_t floats_resident = 0;
    std::uint64_t floats_peak = 0;
    std::uint64_t points = 0;
    std::exception_ptr error;
    std::thread thread;
  };

  void thread_main(Rank rank) {
    Proc& self = *procs_[static_cast<std::size_t>(rank)];
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return active_ == rank || aborting_; });
      if (aborting_) {
        self.state = Proc::State::Done;
        return;
      }
    }
    ProcContext ctx(*this, rank);
    try {
      program_(ctx);
    } catch (const AbortToken&) {
      // unwound by an aborting run; nothing to record
    } catch (...) {
      self.error = std::current_exception();
    }
    std::lock_guard lock(mu_);
    self.state = Proc::State::Done;
    if (!aborting_) {
      active_ = kScheduler;
      cv_.notify_all();
    }
  }

  // Next runnable rank in ascending cyclic order after cursor. A blocked rank
  // is runnable once its awaited message has arrived.
  Rank pick_next(Rank cursor) const {
    const int p = world_size();
    bool all_done = true;
    for (int i = 1; i <= p; ++i) {
      const Rank r = (cursor + i) % p;
      const Proc& proc = *procs_[static_cast<std::size_t>(r)];
      if (proc.state == Proc::State::Done) {
        continue;
      }
      all_done = false;
      if (proc.state == Proc::State::Ready) {
        return r;
      }
      const auto it = proc.inbox.find(proc.waiting_on);
      if (it != proc.inbox.end() && !it->second.empty()) {
        return r;
      }
    }
    return all_done ? kNobody : kDeadlocked;
  }

  std::string describe_deadlock() const {
    std::ostringstream out;
    out << "deadlock:";
    bool first = true;
    for (Rank r = 0; r < world_size(); ++r) {
      const Proc& proc = *procs_[static_cast<std::size_t>(r)];
      if (proc.state != Proc::State::Blocked) {
        continue;
      }
      out << (first ? " " : "; ") << "rank " << r << " waiting on rank " << proc.waiting_on;
      first = false;
    }
    return out.str();
  }

  void check_all_consumed() const {
    std::ostringstream out;
    bool leftovers = false;
    for (Rank r = 0; r < world_size(); ++r) {
      for (const auto& [source, queue] : procs_[static_cast<std::size_t>(r)]->inbox) {
        if (queue.empty()) {
          continue;
        }
        out << (leftovers ? "; " : "") << queue.size() << " message(s) from rank " << source
            << " to rank " << r;
        leftovers = true;
      }
    }
    if (leftovers) {
      throw ProtocolError("unconsumed messages at termination: " + out.str());
    }
  }

  const RankProgram& program_;
  std::vector<std::unique_ptr<Proc>> procs_;
  FabricLedger ledger_;

  std::mutex mu_;
  std::condition_variable cv_;
  Rank active_ = kScheduler;
  bool aborting_ = false;
};

int ProcContext::world_size() const { return fabric_->world_size(); }

void ProcContext::send(Rank to, std::vector<double> payload, Channel channel) {
  const std::uint64_t floats = payload.size();
  fabric_->do_send(rank_, to, std::move(payload), {ChannelShare{channel, floats}});
}

void ProcContext::send(Rank to, std::vector<double> payload,
                       std::initializer_list<ChannelShare> split) {
  fabric_->do_send(rank_, to, std::move(payload), split);
}

std::vector<double> ProcContext::recv(Rank from) { return fabric_->do_recv(rank_, from); }

void ProcContext::alloc_floats(std::uint64_t n) { fabric_->do_alloc(rank_, n); }

void ProcContext::free_floats(std::uint64_t n) { fabric_->do_free(rank_, n); }

void ProcContext::add_points(std::uint64_t n) { fabric_->do_points(rank_, n); }

FabricLedger fabric_run(int num_processes, const RankProgram& program) {
  if (num_processes < 1) {
    throw ConfigError("fabric_run: need at least one process");
  }
  if (!program) {
    throw ConfigError("fabric_run: empty program");
  }
  Fabric fabric(num_processes, program);
  return fabric.run();
}

}  // namespace bootsim::simnet
