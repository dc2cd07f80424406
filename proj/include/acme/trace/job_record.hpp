#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace acme::trace {

enum class WorkloadType { kPretraining, kSft, kMllm, kEvaluation, kDebug, kOther };
enum class FinalStatus { kCompleted, kCanceled, kFailed };

inline constexpr WorkloadType kAllWorkloads[] = {
    WorkloadType::kPretraining, WorkloadType::kSft,   WorkloadType::kMllm,
    WorkloadType::kEvaluation,  WorkloadType::kDebug, WorkloadType::kOther};
inline constexpr FinalStatus kAllStatuses[] = {FinalStatus::kCompleted, FinalStatus::kCanceled,
                                               FinalStatus::kFailed};

std::string_view to_string(WorkloadType w);
std::string_view to_string(FinalStatus s);
// Case-insensitive; accepts a few common aliases ("pretrain", "eval", ...).
std::optional<WorkloadType> parse_workload(std::string_view s);
// Accepts scheduler spellings: COMPLETED, CANCELLED, FAILED, NODE_FAIL, TIMEOUT, ...
std::optional<FinalStatus> parse_status(std::string_view s);

// Seren and Kalos are the two characterized clusters; anything else keeps its name.
class ClusterId {
 public:
  ClusterId() = default;
  static ClusterId parse(std::string_view name);

  bool is_seren() const { return name_ == "Seren"; }
  bool is_kalos() const { return name_ == "Kalos"; }
  const std::string& name() const { return name_; }

  friend bool operator==(const ClusterId&, const ClusterId&) = default;
  friend auto operator<=>(const ClusterId&, const ClusterId&) = default;

 private:
  std::string name_ = "Other";
};

using Seconds = std::int64_t;

struct JobRecord {
  std::string job_id;
  ClusterId cluster;
  WorkloadType workload = WorkloadType::kOther;
  Seconds submit_time = 0;
  std::optional<Seconds> start_time;  // absent: never scheduled
  std::optional<Seconds> end_time;
  std::int64_t gpu_num = 0;
  std::int64_t cpu_num = 0;
  std::int64_t node_num = 0;
  FinalStatus state = FinalStatus::kCompleted;
  std::optional<std::string> name;

  bool is_gpu_job() const { return gpu_num > 0; }
  bool started() const { return start_time.has_value() && end_time.has_value(); }
  std::optional<Seconds> duration() const;
  std::optional<Seconds> queuing_delay() const;
  // Requested GPUs x duration; zero for jobs that never ran.
  double gpu_time() const;

  friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

}  // namespace acme::trace
