#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "acme/common/rng.hpp"

namespace acme::sim {

enum class EventKind {
  kSubmit,
  kStart,
  kFinish,
  kFail,
  kCheckpointDone,
  kRestartDone,
  kTransferDone,
  kCustom,
};

std::string_view to_string(EventKind kind);

struct SimEvent {
  double time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kCustom;
  std::string tag;
  std::int64_t subject = -1;  // job, flow or node id, event-specific
  double value = 0;
};

// Single-threaded discrete-event engine. Events run in (time, seq) order where
// seq is the insertion counter, so simultaneous events keep scheduling order.
class Engine {
 public:
  using Handler = std::function<void(Engine&, const SimEvent&)>;

  explicit Engine(std::uint64_t seed = 0) : rng_(seed) {}

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Throws ErrorCode::kCausality when time < now().
  std::uint64_t schedule(double time, EventKind kind, Handler handler, std::string tag = {},
                         std::int64_t subject = -1, double value = 0);
  std::uint64_t schedule_in(double delay, EventKind kind, Handler handler, std::string tag = {},
                            std::int64_t subject = -1, double value = 0) {
    return schedule(now_ + delay, kind, std::move(handler), std::move(tag), subject, value);
  }
  // Cancelled events are dropped without being logged.
  void cancel(std::uint64_t seq) {
    if (pending_.erase(seq) > 0) cancelled_.insert(seq);
  }

  // Processes every pending event with time <= until; returns the count.
  std::size_t run(double until = std::numeric_limits<double>::infinity());

  double now() const { return now_; }
  bool idle() const { return pending_.empty(); }
  Rng& rng() { return rng_; }

  const std::vector<SimEvent>& log() const { return log_; }
  std::uint64_t log_hash() const;
  void write_log_jsonl(std::ostream& out) const;

 private:
  struct Pending {
    SimEvent event;
    Handler handler;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const {
      if (a.event.time != b.event.time) return a.event.time > b.event.time;
      return a.event.seq > b.event.seq;
    }
  };

  double now_ = 0;
  std::uint64_t next_seq_ = 1;
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::unordered_set<std::uint64_t> pending_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::vector<SimEvent> log_;
  Rng rng_;
};

}  // namespace acme::sim
