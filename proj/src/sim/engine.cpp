#include "acme/sim/engine.hpp"

#include <ostream>

#include "acme/common/digest.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

#include <json.hpp>

namespace acme::sim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kSubmit: return "Submit";
    case EventKind::kStart: return "Start";
    case EventKind::kFinish: return "Finish";
    case EventKind::kFail: return "Fail";
    case EventKind::kCheckpointDone: return "CheckpointDone";
    case EventKind::kRestartDone: return "RestartDone";
    case EventKind::kTransferDone: return "TransferDone";
    case EventKind::kCustom: return "Custom";
  }
  return "Custom";
}

std::uint64_t Engine::schedule(double time, EventKind kind, Handler handler, std::string tag,
                               std::int64_t subject, double value) {
  if (time < now_) {
    throw Error(ErrorCode::kCausality, "event '" + tag + "' scheduled at " +
                                           text::format_double(time) + " before now " +
                                           text::format_double(now_));
  }
  const std::uint64_t seq = next_seq_++;
  pending_.insert(seq);
  queue_.push(Pending{SimEvent{time, seq, kind, std::move(tag), subject, value}, std::move(handler)});
  return seq;
}

std::size_t Engine::run(double until) {
  std::size_t processed = 0;
  while (!queue_.empty() && queue_.top().event.time <= until) {
    Pending next = queue_.top();
    queue_.pop();
    if (cancelled_.erase(next.event.seq) > 0) continue;
    pending_.erase(next.event.seq);
    now_ = next.event.time;
    log_.push_back(next.event);
    ++processed;
    if (next.handler) next.handler(*this, log_.back());
  }
  return processed;
}

std::uint64_t Engine::log_hash() const {
  Fnv1a h;
  for (const auto& e : log_) {
    h.update_double(e.time);
    h.update_u64(e.seq);
    h.update_u64(static_cast<std::uint64_t>(e.kind));
    h.update(e.tag);
    h.update_u64(static_cast<std::uint64_t>(e.subject));
    h.update_double(e.value);
  }
  return h.value();
}

void Engine::write_log_jsonl(std::ostream& out) const {
  for (const auto& e : log_) {
    nlohmann::ordered_json j;
    j["time"] = e.time;
    j["seq"] = e.seq;
    j["kind"] = to_string(e.kind);
    j["tag"] = e.tag;
    j["subject"] = e.subject;
    j["value"] = e.value;
    out << j.dump() << '\n';
  }
}

}  // namespace acme::sim
