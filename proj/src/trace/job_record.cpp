#include "acme/trace/job_record.hpp"

#include "acme/common/text.hpp"

namespace acme::trace {

std::string_view to_string(WorkloadType w) {
  switch (w) {
    case WorkloadType::kPretraining: return "Pretraining";
    case WorkloadType::kSft: return "SFT";
    case WorkloadType::kMllm: return "MLLM";
    case WorkloadType::kEvaluation: return "Evaluation";
    case WorkloadType::kDebug: return "Debug";
    case WorkloadType::kOther: return "Other";
  }
  return "Other";
}

std::string_view to_string(FinalStatus s) {
  switch (s) {
    case FinalStatus::kCompleted: return "Completed";
    case FinalStatus::kCanceled: return "Canceled";
    case FinalStatus::kFailed: return "Failed";
  }
  return "Failed";
}

std::optional<WorkloadType> parse_workload(std::string_view s) {
  const std::string v = text::lower(text::trim(s));
  if (v == "pretraining" || v == "pretrain") return WorkloadType::kPretraining;
  if (v == "sft") return WorkloadType::kSft;
  if (v == "mllm") return WorkloadType::kMllm;
  if (v == "evaluation" || v == "eval") return WorkloadType::kEvaluation;
  if (v == "debug") return WorkloadType::kDebug;
  if (v == "other") return WorkloadType::kOther;
  return std::nullopt;
}

std::optional<FinalStatus> parse_status(std::string_view s) {
  const std::string v = text::lower(text::trim(s));
  if (v == "completed" || v == "complete") return FinalStatus::kCompleted;
  if (v == "canceled" || v == "cancelled") return FinalStatus::kCanceled;
  if (v == "failed" || v == "node_fail" || v == "timeout" || v == "out_of_memory") {
    return FinalStatus::kFailed;
  }
  return std::nullopt;
}

ClusterId ClusterId::parse(std::string_view name) {
  ClusterId id;
  const std::string_view n = text::trim(name);
  if (text::iequals(n, "seren")) {
    id.name_ = "Seren";
  } else if (text::iequals(n, "kalos")) {
    id.name_ = "Kalos";
  } else if (!n.empty()) {
    id.name_ = std::string(n);
  }
  return id;
}

std::optional<Seconds> JobRecord::duration() const {
  if (!started()) return std::nullopt;
  return *end_time - *start_time;
}

std::optional<Seconds> JobRecord::queuing_delay() const {
  if (!start_time) return std::nullopt;
  return *start_time - submit_time;
}

double JobRecord::gpu_time() const {
  const auto d = duration();
  if (!d) return 0.0;
  return static_cast<double>(gpu_num) * static_cast<double>(*d);
}

}  // namespace acme::trace
