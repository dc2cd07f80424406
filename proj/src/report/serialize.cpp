#include "acme/report/serialize.hpp"

#include <charconv>
#include <cstdio>

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::report {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::kData, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kData, std::string("bad value for '") + key + "'");
  }
}

const Json& sub(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::kData, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
Json encode_all(const std::vector<T>& items) {
  Json a = Json::array();
  for (const auto& x : items) a.push_back(encode(x));
  return a;
}

template <typename T>
std::vector<T> decode_all(const Json& a) {
  if (!a.is_array()) throw Error(ErrorCode::kData, "expected an array");
  std::vector<T> out;
  for (const auto& x : a) out.push_back(decode_as<T>(x));
  return out;
}

// Inverse of to_string over an explicit value list.
template <typename E, std::size_t N>
E parse_enum(const std::string& s, const E (&values)[N], const char* what) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kData, std::string("unknown ") + what + " '" + s + "'");
}

const ft::CheckpointMode kModes[] = {ft::CheckpointMode::kSync, ft::CheckpointMode::kAsync};
const eval::EvalMode kEvalModes[] = {eval::EvalMode::kBaseline, eval::EvalMode::kDecoupled};
const ft::RecoveryAction::Kind kActions[] = {
    ft::RecoveryAction::Kind::kRestartFromLastCheckpoint, ft::RecoveryAction::Kind::kRollbackEarlierAndSkipBatches,
    ft::RecoveryAction::Kind::kCordonNodesAndRestart, ft::RecoveryAction::Kind::kNotifyUserNoRestart};

}  // namespace

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_hash_hex(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::kData, "bad hash '" + s + "'");
  }
  return v;
}

// ---- analytics

Json encode(const analytics::DistributionSummary& v) {
  Json j;
  j["count"] = v.count;
  j["mean"] = v.mean;
  j["median"] = v.median;
  j["p5"] = v.p5;
  j["p95"] = v.p95;
  j["p99"] = v.p99;
  Json pts = Json::array();
  for (const auto& p : v.cdf_points) pts.push_back(Json::array({p.value, p.fraction}));
  j["cdf_points"] = pts;
  return j;
}

void decode(const Json& j, analytics::DistributionSummary& v) {
  v.count = field<std::size_t>(j, "count");
  v.mean = field<double>(j, "mean");
  v.median = field<double>(j, "median");
  v.p5 = field<double>(j, "p5");
  v.p95 = field<double>(j, "p95");
  v.p99 = field<double>(j, "p99");
  v.cdf_points.clear();
  for (const auto& p : sub(j, "cdf_points")) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::kData, "bad cdf point");
    v.cdf_points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
}

Json encode(const analytics::BreakdownRow& v) {
  Json j;
  j["group"] = v.group;
  j["count"] = v.count;
  j["gpu_time"] = v.gpu_time;
  j["count_share"] = v.count_share;
  j["gpu_time_share"] = v.gpu_time_share;
  return j;
}

void decode(const Json& j, analytics::BreakdownRow& v) {
  v.group = field<std::string>(j, "group");
  v.count = field<std::size_t>(j, "count");
  v.gpu_time = field<double>(j, "gpu_time");
  v.count_share = field<double>(j, "count_share");
  v.gpu_time_share = field<double>(j, "gpu_time_share");
}

// ---- fault tolerance

Json encode(const ft::CheckpointOverhead& v) {
  Json j;
  j["saves"] = v.saves;
  j["blocked_seconds"] = v.blocked_seconds;
  j["blocked_fraction"] = v.blocked_fraction;
  return j;
}

void decode(const Json& j, ft::CheckpointOverhead& v) {
  v.saves = field<int>(j, "saves");
  v.blocked_seconds = field<double>(j, "blocked_seconds");
  v.blocked_fraction = field<double>(j, "blocked_fraction");
}

Json encode(const ft::CampaignResult& v) {
  Json j;
  j["interval_min"] = v.interval;
  j["mode"] = to_string(v.mode);
  j["incidents"] = v.incidents;
  Json kinds = Json::object();
  for (const auto& [k, n] : v.by_kind) kinds[k] = n;
  j["by_kind"] = kinds;
  Json actions = Json::object();
  for (const auto& [k, n] : v.by_action) actions[k] = n;
  j["by_action"] = actions;
  j["cordoned_nodes"] = v.cordoned_nodes;
  j["unresolved_nodes"] = v.unresolved_nodes;
  j["saves"] = v.saves;
  j["wasted_minutes"] = v.wasted_minutes;
  j["mean_wasted_minutes"] = v.mean_wasted_minutes;
  j["blocked_seconds"] = v.blocked_seconds;
  j["progress_minutes"] = v.progress_minutes;
  j["goodput"] = v.goodput;
  j["event_log_hash"] = hash_hex(v.event_log_hash);
  return j;
}

void decode(const Json& j, ft::CampaignResult& v) {
  v.interval = field<double>(j, "interval_min");
  v.mode = parse_enum(field<std::string>(j, "mode"), kModes, "checkpoint mode");
  v.incidents = field<int>(j, "incidents");
  v.by_kind = field<std::map<std::string, int>>(j, "by_kind");
  v.by_action = field<std::map<std::string, int>>(j, "by_action");
  v.cordoned_nodes = field<int>(j, "cordoned_nodes");
  v.unresolved_nodes = field<int>(j, "unresolved_nodes");
  v.saves = field<int>(j, "saves");
  v.wasted_minutes = field<double>(j, "wasted_minutes");
  v.mean_wasted_minutes = field<double>(j, "mean_wasted_minutes");
  v.blocked_seconds = field<double>(j, "blocked_seconds");
  v.progress_minutes = field<double>(j, "progress_minutes");
  v.goodput = field<double>(j, "goodput");
  v.event_log_hash = parse_hash_hex(field<std::string>(j, "event_log_hash"));
}

Json encode(const ft::DetectionResult& v) {
  Json j;
  j["faulty"] = v.faulty;
  j["unresolved"] = v.unresolved;
  j["round1_worlds"] = v.round1_worlds;
  j["round2_worlds"] = v.round2_worlds;
  j["round1_calls"] = v.round1_calls;
  j["round2_calls"] = v.round2_calls;
  return j;
}

void decode(const Json& j, ft::DetectionResult& v) {
  v.faulty = field<std::vector<ft::NodeId>>(j, "faulty");
  v.unresolved = field<std::vector<ft::NodeId>>(j, "unresolved");
  v.round1_worlds = field<std::vector<std::vector<ft::NodeId>>>(j, "round1_worlds");
  v.round2_worlds = field<std::vector<std::vector<ft::NodeId>>>(j, "round2_worlds");
  v.round1_calls = field<int>(j, "round1_calls");
  v.round2_calls = field<int>(j, "round2_calls");
}

Json encode(const ft::RecoveryAction& v) {
  Json j;
  j["kind"] = to_string(v.kind);
  j["checkpoint_id"] = v.checkpoint_id;
  j["skip_count"] = v.skip_count;
  j["nodes"] = v.nodes;
  j["unresolved"] = v.unresolved;
  return j;
}

void decode(const Json& j, ft::RecoveryAction& v) {
  v.kind = parse_enum(field<std::string>(j, "kind"), kActions, "recovery action");
  v.checkpoint_id = field<int>(j, "checkpoint_id");
  v.skip_count = field<long long>(j, "skip_count");
  v.nodes = field<std::vector<ft::NodeId>>(j, "nodes");
  v.unresolved = field<std::vector<ft::NodeId>>(j, "unresolved");
}

// ---- scheduling

Json encode(const sched::JobOutcome& v) {
  Json j;
  j["id"] = v.id;
  j["workload"] = trace::to_string(v.workload);
  j["submit_time"] = v.submit_time;
  j["first_start"] = v.first_start;
  j["finish"] = v.finish;
  j["preemptions"] = v.preemptions;
  j["lost_seconds"] = v.lost_seconds;
  return j;
}

void decode(const Json& j, sched::JobOutcome& v) {
  v.id = field<std::string>(j, "id");
  const auto w = trace::parse_workload(field<std::string>(j, "workload"));
  if (!w) throw Error(ErrorCode::kData, "unknown workload");
  v.workload = *w;
  v.submit_time = field<double>(j, "submit_time");
  v.first_start = field<double>(j, "first_start");
  v.finish = field<double>(j, "finish");
  v.preemptions = field<int>(j, "preemptions");
  v.lost_seconds = field<double>(j, "lost_seconds");
}

Json encode(const sched::ReplayResult& v) {
  Json j;
  j["preemptions"] = v.preemptions;
  j["makespan"] = v.makespan;
  j["events"] = v.events;
  j["event_log_hash"] = hash_hex(v.event_log_hash);
  j["outcomes"] = encode_all(v.outcomes);
  return j;
}

void decode(const Json& j, sched::ReplayResult& v) {
  v.preemptions = field<int>(j, "preemptions");
  v.makespan = field<double>(j, "makespan");
  v.events = field<std::size_t>(j, "events");
  v.event_log_hash = parse_hash_hex(field<std::string>(j, "event_log_hash"));
  v.outcomes = decode_all<sched::JobOutcome>(sub(j, "outcomes"));
}

// ---- evaluation

Json encode(const eval::Phase& v) {
  Json j;
  j["kind"] = to_string(v.kind);
  j["gpu"] = v.gpu;
  j["node"] = v.node;
  j["dataset"] = v.dataset;
  j["shard"] = v.shard;
  j["shards"] = v.shards;
  j["inference_ticks"] = v.inference_ticks;
  j["metric_minutes"] = v.metric_minutes;
  j["start"] = v.start;
  j["end"] = v.end;
  return j;
}

void decode(const Json& j, eval::Phase& v) {
  if (!eval::parse_phase_kind(field<std::string>(j, "kind"), v.kind)) {
    throw Error(ErrorCode::kData, "unknown phase kind");
  }
  v.gpu = field<int>(j, "gpu");
  v.node = field<int>(j, "node");
  v.dataset = field<std::string>(j, "dataset");
  v.shard = field<int>(j, "shard");
  v.shards = field<int>(j, "shards");
  v.inference_ticks = field<std::int64_t>(j, "inference_ticks");
  v.metric_minutes = field<double>(j, "metric_minutes");
  v.start = field<double>(j, "start");
  v.end = field<double>(j, "end");
}

Json encode(const eval::TrialPlan& v) {
  Json j;
  j["mode"] = to_string(v.mode);
  j["nodes"] = v.nodes;
  j["gpus_per_node"] = v.gpus_per_node;
  j["packing"] = v.packing;
  Json lanes = Json::array();
  for (const auto& lane : v.gpu_phases) lanes.push_back(encode_all(lane));
  j["gpu_phases"] = lanes;
  j["cpu_phases"] = encode_all(v.cpu_phases);
  return j;
}

void decode(const Json& j, eval::TrialPlan& v) {
  v.mode = parse_enum(field<std::string>(j, "mode"), kEvalModes, "eval mode");
  v.nodes = field<int>(j, "nodes");
  v.gpus_per_node = field<int>(j, "gpus_per_node");
  v.packing = field<std::string>(j, "packing");
  v.gpu_phases.clear();
  const Json& lanes = sub(j, "gpu_phases");
  if (!lanes.is_array()) throw Error(ErrorCode::kData, "gpu_phases must be an array");
  for (const auto& lane : lanes) v.gpu_phases.push_back(decode_all<eval::Phase>(lane));
  v.cpu_phases = decode_all<eval::Phase>(sub(j, "cpu_phases"));
}

Json encode(const eval::EvalResult& v) {
  Json j;
  j["makespan"] = v.makespan;
  j["completion"] = v.completion;
  j["mean_idle_fraction"] = v.mean_idle_fraction;
  j["gpu_idle_fraction"] = v.gpu_idle_fraction;
  j["gpu_busy_seconds"] = v.gpu_busy_seconds;
  j["inference_seconds"] = v.inference_seconds;
  j["event_log_hash"] = hash_hex(v.event_log_hash);
  j["timeline"] = encode(v.timeline);
  return j;
}

void decode(const Json& j, eval::EvalResult& v) {
  v.makespan = field<double>(j, "makespan");
  v.completion = field<double>(j, "completion");
  v.mean_idle_fraction = field<double>(j, "mean_idle_fraction");
  v.gpu_idle_fraction = field<std::vector<double>>(j, "gpu_idle_fraction");
  v.gpu_busy_seconds = field<double>(j, "gpu_busy_seconds");
  v.inference_seconds = field<double>(j, "inference_seconds");
  v.event_log_hash = parse_hash_hex(field<std::string>(j, "event_log_hash"));
  decode(sub(j, "timeline"), v.timeline);
}

// ---- diagnosis

Json encode(const diag::DiagnosisResult& v) {
  Json j;
  j["reason"] = v.reason;
  j["category"] = diag::to_string(v.category);
  j["origin"] = diag::to_string(v.origin);
  j["recoverable"] = diag::to_string(v.recoverable);
  j["mitigation"] = v.mitigation;
  j["evidence_lines"] = v.evidence_lines;
  return j;
}

void decode(const Json& j, diag::DiagnosisResult& v) {
  v.reason = field<std::string>(j, "reason");
  const auto c = diag::parse_category(field<std::string>(j, "category"));
  const auto o = diag::parse_origin(field<std::string>(j, "origin"));
  const auto r = diag::parse_recoverable(field<std::string>(j, "recoverable"));
  if (!c || !o || !r) throw Error(ErrorCode::kData, "bad diagnosis enum value");
  v.category = *c;
  v.origin = *o;
  v.recoverable = *r;
  v.mitigation = field<std::string>(j, "mitigation");
  v.evidence_lines = field<std::vector<std::size_t>>(j, "evidence_lines");
}

Json encode(const diag::DiagnosisReport& v) {
  Json j;
  j["result"] = encode(v.result);
  j["path"] = v.path;
  j["total_lines"] = v.total_lines;
  j["kept_lines"] = v.kept_lines;
  j["compression"] = v.compression();
  j["client_calls"] = v.client_calls;
  j["filter_rules_learned"] = v.filter_rules_learned;
  j["reason_rule_learned"] = v.reason_rule_learned;
  j["kept"] = v.kept;
  return j;
}

void decode(const Json& j, diag::DiagnosisReport& v) {
  decode(sub(j, "result"), v.result);
  v.path = field<std::string>(j, "path");
  v.total_lines = field<std::size_t>(j, "total_lines");
  v.kept_lines = field<std::size_t>(j, "kept_lines");
  v.client_calls = field<std::size_t>(j, "client_calls");
  v.filter_rules_learned = field<std::size_t>(j, "filter_rules_learned");
  v.reason_rule_learned = field<bool>(j, "reason_rule_learned");
  v.kept = field<std::vector<std::string>>(j, "kept");
}

// ---- timeline table

namespace {

const std::vector<std::string> kTimelineHeader = {"gpu",    "node",           "kind",           "dataset",
                                                  "shard",  "shards",         "inference_ticks", "metric_minutes",
                                                  "start_s", "end_s"};

std::vector<std::string> phase_row(const eval::Phase& p) {
  return {std::to_string(p.gpu),
          std::to_string(p.node),
          std::string(to_string(p.kind)),
          p.dataset,
          std::to_string(p.shard),
          std::to_string(p.shards),
          std::to_string(p.inference_ticks),
          text::format_double(p.metric_minutes),
          text::format_double(p.start),
          text::format_double(p.end)};
}

long long int_cell(const std::string& s) {
  const auto v = text::parse_int(s);
  if (!v) throw Error(ErrorCode::kData, "bad integer '" + s + "' in timeline");
  return *v;
}

double double_cell(const std::string& s) {
  const auto v = text::parse_double(s);
  if (!v) throw Error(ErrorCode::kData, "bad number '" + s + "' in timeline");
  return *v;
}

}  // namespace

Table timeline_table(const eval::TrialPlan& plan) {
  Table t;
  t.header = kTimelineHeader;
  for (const auto& lane : plan.gpu_phases) {
    for (const auto& p : lane) t.rows.push_back(phase_row(p));
  }
  for (const auto& p : plan.cpu_phases) t.rows.push_back(phase_row(p));
  return t;
}

eval::TrialPlan timeline_to_plan(const Table& table, eval::EvalMode mode, int nodes, int gpus_per_node,
                                 int gpus, const std::string& packing) {
  if (table.header != kTimelineHeader) throw Error(ErrorCode::kData, "unexpected timeline header");
  eval::TrialPlan plan;
  plan.mode = mode;
  plan.nodes = nodes;
  plan.gpus_per_node = gpus_per_node;
  plan.packing = packing;
  plan.gpu_phases.resize(static_cast<std::size_t>(gpus));
  for (const auto& row : table.rows) {
    if (row.size() != kTimelineHeader.size()) throw Error(ErrorCode::kData, "short timeline row");
    eval::Phase p;
    p.gpu = static_cast<int>(int_cell(row[0]));
    p.node = static_cast<int>(int_cell(row[1]));
    if (!eval::parse_phase_kind(row[2], p.kind)) throw Error(ErrorCode::kData, "unknown phase kind " + row[2]);
    p.dataset = row[3];
    p.shard = static_cast<int>(int_cell(row[4]));
    p.shards = static_cast<int>(int_cell(row[5]));
    p.inference_ticks = int_cell(row[6]);
    p.metric_minutes = double_cell(row[7]);
    p.start = double_cell(row[8]);
    p.end = double_cell(row[9]);
    if (p.gpu < 0) {
      plan.cpu_phases.push_back(std::move(p));
    } else if (p.gpu < gpus) {
      plan.gpu_phases[static_cast<std::size_t>(p.gpu)].push_back(std::move(p));
    } else {
      throw Error(ErrorCode::kData, "timeline GPU index out of range");
    }
  }
  return plan;
}

}  // namespace acme::report
