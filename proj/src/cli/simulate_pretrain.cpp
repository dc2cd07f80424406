#include <algorithm>
#include <ostream>

#include "acme/cli/commands.hpp"
#include "acme/common/digest.hpp"
#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"
#include "acme/common/text.hpp"
#include "acme/diag/reason_rules.hpp"
#include "acme/ft/failure_model.hpp"
#include "acme/report/serialize.hpp"

namespace acme::cli {

namespace {

using report::Json;
using report::Table;
using text::format_double;

// Independent stream per section so adding one section leaves the others
// unchanged.
std::uint64_t section_seed(std::uint64_t seed, std::string_view section) { return seed ^ fnv1a(section); }

std::vector<std::string> list(const KvConfig& kv, const std::string& key, const std::string& fallback) {
  std::vector<std::string> out;
  for (const auto& item : text::split(kv.get_string(key, fallback), ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

Json fit_json(const ft::FittedDistribution& d) {
  Json j;
  j["shape"] = to_string(d.shape);
  j["mean"] = d.mean();
  j["median"] = d.median();
  j["infeasible"] = d.infeasible;
  return j;
}

Json failure_section(const ft::FailureModel& model, Table& table) {
  Json reasons = Json::array();
  for (const auto& r : model.reasons()) {
    Json j;
    j["reason"] = r.name;
    j["category"] = diag::to_string(r.category);
    j["num"] = r.num;
    j["ttf"] = fit_json(r.ttf);
    j["restart"] = fit_json(r.restart);
    reasons.push_back(j);
    table.rows.push_back({r.name, std::string(diag::to_string(r.category)), format_double(r.num),
                          std::string(to_string(r.ttf.shape)), format_double(r.ttf.mean()),
                          format_double(r.ttf.median()), std::string(to_string(r.restart.shape)),
                          format_double(r.restart.mean()), format_double(r.restart.median()),
                          r.ttf.infeasible || r.restart.infeasible ? "yes" : "no"});
  }
  Json j;
  j["reasons"] = reasons;
  j["total_weight"] = model.total_weight();
  return j;
}

Json calibration_section(const RunConfig& rc, Table& table) {
  Json out = Json::array();
  for (const auto& file : list(rc.kv, "pretrain.calibrations", "")) {
    const auto path = rc.kv.resolve_path(file);
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kData, "pretrain.calibrations: no such file: " + path.string());
    }
    const KvConfig cal_cfg = KvConfig::load(path);
    const auto cal = ft::CheckpointCalibration::from_config(cal_cfg, "checkpoint.calibration");
    const auto cfg = cal.derive(rc.checkpoint.interval, rc.checkpoint.host_memory_slots);
    Json j;
    j["name"] = cal.name;
    j["psi"] = cal.model.psi;
    j["gpus"] = cal.gpus;
    j["t_block_sync_s"] = cfg.t_block_sync;
    j["t_block_async_s"] = cfg.t_block_async;
    j["persist_time_s"] = cfg.persist_time;
    j["sync_async_ratio"] = cfg.t_block_sync / cfg.t_block_async;
    out.push_back(j);
    table.rows.push_back({cal.name, format_double(cal.model.psi), std::to_string(cal.gpus),
                          format_double(cfg.t_block_sync), format_double(cfg.t_block_async),
                          format_double(cfg.persist_time), format_double(cfg.t_block_sync / cfg.t_block_async)});
  }
  return out;
}

Json summarize_replay(const sched::ReplayResult& r) {
  std::map<std::string, std::vector<double>> delays;
  for (const auto& o : r.outcomes) {
    if (o.first_start >= 0) delays[std::string(trace::to_string(o.workload))].push_back(o.queuing_delay());
  }
  Json groups = Json::object();
  for (auto& [w, v] : delays) {
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (double x : v) sum += x;
    Json g;
    g["jobs"] = v.size();
    g["mean_queuing_delay"] = sum / static_cast<double>(v.size());
    g["median_queuing_delay"] = v[(v.size() - 1) / 2];
    groups[w] = g;
  }
  double lost = 0;
  for (const auto& o : r.outcomes) lost += o.lost_seconds;
  Json j;
  j["jobs"] = r.outcomes.size();
  j["preemptions"] = r.preemptions;
  j["lost_seconds"] = lost;
  j["makespan"] = r.makespan;
  j["events"] = r.events;
  j["event_log_hash"] = report::hash_hex(r.event_log_hash);
  j["by_workload"] = groups;
  return j;
}

}  // namespace

report::Report run_simulate_pretrain(const RunConfig& rc, std::ostream& summary) {
  const std::uint64_t seed = rc.require_seed();
  if (!rc.failure_model_path) throw Error(ErrorCode::kConfig, "simulate-pretrain needs failure_model.path");
  const auto family = ft::parse_fit_family(rc.kv.get_string("failure_model.fit", "lognormal"));
  if (!family) throw Error(ErrorCode::kConfig, "failure_model.fit must be lognormal or exponential");
  const ft::FailureModel model = ft::FailureModel::load(*rc.failure_model_path, *family);

  report::Report rep;
  rep.command = "simulate-pretrain";
  rep.seed = seed;
  rep.config = rc.recorded();

  Table fits{{"reason", "category", "num", "ttf_shape", "ttf_mean_min", "ttf_median_min", "restart_shape",
              "restart_mean_min", "restart_median_min", "infeasible"},
             {}};
  rep.results["failure_model"] = failure_section(model, fits);
  rep.tables["failure_fits"] = std::move(fits);

  Table cal_table{{"name", "psi", "gpus", "t_block_sync_s", "t_block_async_s", "persist_time_s", "sync_async_ratio"},
                  {}};
  rep.results["calibrations"] = calibration_section(rc, cal_table);
  rep.tables["checkpoint_calibrations"] = std::move(cal_table);

  // Checkpoint campaigns: every interval and mode replays the same incidents.
  ft::CampaignConfig base;
  base.horizon = rc.kv.get_double("pretrain.horizon_days", 14) * 24 * 60;
  base.nodes = static_cast<int>(rc.kv.get_int("pretrain.nodes", 32));
  base.rollback_depth = static_cast<int>(rc.kv.get_int("pretrain.rollback_depth", 1));
  base.loss_spikes_per_day = rc.kv.get_double("pretrain.loss_spikes_per_day", base.loss_spikes_per_day);
  base.hangs_per_day = rc.kv.get_double("pretrain.hangs_per_day", base.hangs_per_day);
  base.hang_detect = rc.kv.get_double("pretrain.hang_detect_min", base.hang_detect);
  base.anomaly_restart = rc.kv.get_double("pretrain.anomaly_restart_min", base.anomaly_restart);
  base.steps_per_minute = rc.kv.get_double("pretrain.steps_per_minute", base.steps_per_minute);
  base.seed = section_seed(seed, "campaign");
  if (!(base.horizon > 0) || base.nodes < 1) {
    throw Error(ErrorCode::kConfig, "pretrain.horizon_days and pretrain.nodes must be positive");
  }
  const auto incidents = ft::incident_trace(model, base);

  Table overhead{{"interval_min", "mode", "saves", "blocked_seconds", "blocked_fraction"}, {}};
  Table campaign{{"interval_min", "mode", "incidents", "saves", "wasted_minutes", "mean_wasted_minutes",
                  "blocked_seconds", "progress_minutes", "goodput", "cordoned_nodes", "unresolved_nodes"},
                 {}};
  Json overhead_json = Json::array();
  Json campaign_json = Json::array();
  for (const auto& item : list(rc.kv, "pretrain.intervals_min", "30,120")) {
    const auto interval = text::parse_double(item);
    if (!interval || !(*interval > 0)) throw Error(ErrorCode::kConfig, "pretrain.intervals_min: bad value " + item);
    for (const auto mode : {ft::CheckpointMode::kSync, ft::CheckpointMode::kAsync}) {
      ft::CampaignConfig cfg = base;
      cfg.checkpoint = rc.checkpoint;
      cfg.checkpoint.interval = *interval;
      cfg.checkpoint.validate();
      cfg.mode = mode;
      const auto o = ft::checkpoint_overhead(cfg.checkpoint, mode, cfg.horizon);
      Json oj = report::encode(o);
      oj["interval_min"] = *interval;
      oj["mode"] = to_string(mode);
      overhead_json.push_back(oj);
      overhead.rows.push_back({format_double(*interval), std::string(to_string(mode)), std::to_string(o.saves),
                               format_double(o.blocked_seconds), format_double(o.blocked_fraction)});

      const auto r = ft::run_campaign(incidents, cfg);
      campaign_json.push_back(report::encode(r));
      campaign.rows.push_back({format_double(r.interval), std::string(to_string(r.mode)),
                               std::to_string(r.incidents), std::to_string(r.saves), format_double(r.wasted_minutes),
                               format_double(r.mean_wasted_minutes), format_double(r.blocked_seconds),
                               format_double(r.progress_minutes), format_double(r.goodput),
                               std::to_string(r.cordoned_nodes), std::to_string(r.unresolved_nodes)});
      summary << "  checkpoint " << *interval << " min " << to_string(mode) << ": goodput "
              << r.goodput << ", wasted " << r.wasted_minutes << " min\n";
    }
  }
  Json ckpt;
  ckpt["horizon_min"] = base.horizon;
  ckpt["incidents"] = incidents.size();
  ckpt["overhead"] = overhead_json;
  ckpt["campaigns"] = campaign_json;
  rep.results["checkpoint"] = ckpt;
  rep.tables["checkpoint_overhead"] = std::move(overhead);
  rep.tables["checkpoint_campaign"] = std::move(campaign);

  // Quota scheduling: the same workload with and without a pretraining reservation.
  const int sched_nodes = static_cast<int>(rc.kv.get_int("sched.nodes", 16));
  const double sched_horizon = rc.kv.get_double("sched.horizon_hours", 24) * 3600;
  const auto jobs = sched::synthetic_mixed_workload(section_seed(seed, "sched"), sched_nodes, sched_horizon);
  sched::ReplayOptions shared;
  shared.seed = section_seed(seed, "replay");
  sched::ReplayOptions reserved = shared;
  reserved.quota = rc.quota;
  if (reserved.quota.reserved_nodes == 0) reserved.quota.reserved_nodes = sched_nodes / 2;
  reserved.quota.validate(sched_nodes);
  const auto r_shared = sched::replay_schedule(jobs, sched_nodes, 8, shared);
  const auto r_reserved = sched::replay_schedule(jobs, sched_nodes, 8, reserved);
  Json sj;
  sj["nodes"] = sched_nodes;
  sj["jobs"] = jobs.size();
  sj["reserved_nodes"] = reserved.quota.reserved_nodes;
  sj["preemptible"] = reserved.quota.preemptible;
  sj["no_quota"] = summarize_replay(r_shared);
  sj["quota"] = summarize_replay(r_reserved);
  rep.results["scheduling"] = sj;
  Table outcomes{{"policy", "id", "workload", "submit_time", "first_start", "finish", "preemptions", "lost_seconds"},
                 {}};
  for (const auto& [name, res] : {std::pair<std::string, const sched::ReplayResult*>{"no_quota", &r_shared},
                                  {"quota", &r_reserved}}) {
    for (const auto& o : res->outcomes) {
      outcomes.rows.push_back({name, o.id, std::string(trace::to_string(o.workload)), format_double(o.submit_time),
                               format_double(o.first_start), format_double(o.finish), std::to_string(o.preemptions),
                               format_double(o.lost_seconds)});
    }
  }
  rep.tables["sched_outcomes"] = std::move(outcomes);
  summary << "  scheduling: " << jobs.size() << " jobs, " << r_reserved.preemptions
          << " preemptions with the quota\n";

  // Fault localization after an infrastructure failure.
  const int detect_nodes = static_cast<int>(rc.kv.get_int("pretrain.detect_nodes", 16));
  const int detect_faulty = static_cast<int>(rc.kv.get_int("pretrain.detect_faulty", 2));
  if (detect_nodes < 1 || detect_faulty < 0 || detect_faulty > detect_nodes) {
    throw Error(ErrorCode::kConfig, "pretrain.detect_faulty must lie in [0, pretrain.detect_nodes]");
  }
  std::vector<ft::NodeId> nodes(static_cast<std::size_t>(detect_nodes));
  for (int i = 0; i < detect_nodes; ++i) nodes[static_cast<std::size_t>(i)] = i;
  std::vector<ft::NodeId> pool = nodes;
  Rng rng(section_seed(seed, "detect"));
  std::vector<ft::NodeId> truth;
  for (int i = 0; i < detect_faulty; ++i) {
    const auto k = static_cast<std::size_t>(rng.below(pool.size()));
    truth.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(truth.begin(), truth.end());
  const auto oracle = ft::make_set_oracle(truth);
  const auto detection = ft::two_round_detect(nodes, oracle);

  diag::DiagnosisResult nccl;
  const diag::ReasonInfo* info = diag::find_reason("NCCL Timeout Error");
  nccl.reason = std::string(info->name);
  nccl.category = info->category;
  nccl.origin = info->origin;
  nccl.recoverable = info->recoverable;
  ft::RecoveryContext ctx;
  ctx.nodes = nodes;
  ctx.oracle = oracle;
  const auto action = ft::recovery_action(nccl, ctx);
  Json dj;
  dj["nodes"] = detect_nodes;
  dj["injected_faulty"] = truth;
  dj["detection"] = report::encode(detection);
  dj["oracle_calls"] = detection.oracle_calls();
  dj["recovery"] = report::encode(action);
  rep.results["fault_localization"] = dj;
  summary << "  fault localization: " << detection.faulty.size() << " faulty of " << detect_nodes << " nodes in "
          << detection.oracle_calls() << " checks, action " << to_string(action.kind) << "\n";
  return rep;
}

}  // namespace acme::cli
