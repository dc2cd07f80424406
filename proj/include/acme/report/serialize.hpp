#pragma once

// JSON encoding of result types. decode(encode(x)) == x for every type here;
// decoders throw kData on malformed input.

#include "acme/analytics/breakdown.hpp"
#include "acme/analytics/stats.hpp"
#include "acme/diag/pipeline.hpp"
#include "acme/eval/coordinator.hpp"
#include "acme/ft/campaign.hpp"
#include "acme/ft/checkpoint.hpp"
#include "acme/ft/detection.hpp"
#include "acme/ft/recovery.hpp"
#include "acme/report/report.hpp"
#include "acme/sched/replay.hpp"

namespace acme::report {

Json encode(const analytics::DistributionSummary& v);
Json encode(const analytics::BreakdownRow& v);
Json encode(const ft::CheckpointOverhead& v);
Json encode(const ft::CampaignResult& v);
Json encode(const ft::DetectionResult& v);
Json encode(const ft::RecoveryAction& v);
Json encode(const sched::JobOutcome& v);
Json encode(const sched::ReplayResult& v);
Json encode(const eval::Phase& v);
Json encode(const eval::TrialPlan& v);
Json encode(const eval::EvalResult& v);
Json encode(const diag::DiagnosisResult& v);
Json encode(const diag::DiagnosisReport& v);

void decode(const Json& j, analytics::DistributionSummary& v);
void decode(const Json& j, analytics::BreakdownRow& v);
void decode(const Json& j, ft::CheckpointOverhead& v);
void decode(const Json& j, ft::CampaignResult& v);
void decode(const Json& j, ft::DetectionResult& v);
void decode(const Json& j, ft::RecoveryAction& v);
void decode(const Json& j, sched::JobOutcome& v);
void decode(const Json& j, sched::ReplayResult& v);
void decode(const Json& j, eval::Phase& v);
void decode(const Json& j, eval::TrialPlan& v);
void decode(const Json& j, eval::EvalResult& v);
void decode(const Json& j, diag::DiagnosisResult& v);
void decode(const Json& j, diag::DiagnosisReport& v);

template <typename T>
T decode_as(const Json& j) {
  T v{};
  decode(j, v);
  return v;
}

// 64-bit hashes travel as 16-digit hex strings.
std::string hash_hex(std::uint64_t h);
std::uint64_t parse_hash_hex(const std::string& s);

// Per-GPU phase timeline, one row per phase, lanes in GPU order followed by
// the CPU pool (gpu = -1). Times use shortest round-trip decimals, so
// timeline_to_plan(timeline_table(p), ...) reproduces p exactly.
Table timeline_table(const eval::TrialPlan& plan);
eval::TrialPlan timeline_to_plan(const Table& table, eval::EvalMode mode, int nodes, int gpus_per_node,
                                 int gpus, const std::string& packing);

}  // namespace acme::report
