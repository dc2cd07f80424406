#include "acme/ft/campaign.hpp"

#include <algorithm>
#include <cmath>

#include "acme/common/error.hpp"
#include "acme/diag/reason_rules.hpp"
#include "acme/sim/engine.hpp"

namespace acme::ft {

std::string_view to_string(IncidentKind k) {
  switch (k) {
    case IncidentKind::kFailure: return "failure";
    case IncidentKind::kLossSpike: return "loss_spike";
    case IncidentKind::kHang: return "hang";
  }
  return "unknown";
}

std::vector<Incident> incident_trace(const FailureModel& model, const CampaignConfig& cfg) {
  if (!(cfg.horizon >= 0)) throw Error(ErrorCode::kConfig, "campaign horizon must be >= 0");
  if (cfg.nodes < 1) throw Error(ErrorCode::kConfig, "campaign needs at least one node");
  Rng rng(cfg.seed);
  const double spike_mean = cfg.loss_spikes_per_day > 0 ? 1440.0 / cfg.loss_spikes_per_day : 0;
  const double hang_mean = cfg.hangs_per_day > 0 ? 1440.0 / cfg.hangs_per_day : 0;
  std::vector<Incident> out;
  double t = 0;
  while (t < cfg.horizon) {
    Incident inc;
    inc.failure = sample_failure(model, rng, cfg.nodes);
    inc.after = inc.failure.time_to_failure;
    inc.downtime = inc.failure.restart_time;
    // Draw both anomaly clocks every round so the stream stays aligned.
    const double spike = spike_mean > 0 ? rng.exponential(spike_mean) : INFINITY;
    const double hang = hang_mean > 0 ? rng.exponential(hang_mean) : INFINITY;
    if (spike < inc.after && spike <= hang) {
      inc.kind = IncidentKind::kLossSpike;
      inc.failure = {"Loss Spike", diag::Category::kUnknown, spike, cfg.anomaly_restart, {}};
      inc.after = spike;
      inc.downtime = cfg.anomaly_restart;
    } else if (hang < inc.after) {
      inc.kind = IncidentKind::kHang;
      inc.failure = {"Hang", diag::Category::kUnknown, hang, cfg.anomaly_restart, {}};
      inc.after = hang;
      inc.downtime = cfg.hang_detect + cfg.anomaly_restart;
    }
    t += inc.after + inc.downtime;
    out.push_back(std::move(inc));
  }
  return out;
}

namespace {

diag::DiagnosisResult diagnosis_for(const FailureEvent& ev) {
  diag::DiagnosisResult d;
  d.reason = ev.reason;
  d.category = ev.category;
  if (const auto* info = diag::find_reason(ev.reason)) {
    d.origin = info->origin;
    d.recoverable = info->recoverable;
  }
  d.evidence_lines = {0};
  return d;
}

}  // namespace

CampaignResult run_campaign(const std::vector<Incident>& trace, const CampaignConfig& cfg) {
  cfg.checkpoint.validate();
  const double interval = cfg.checkpoint.interval;
  CampaignResult res;
  res.interval = interval;
  res.mode = cfg.mode;

  sim::Engine engine(cfg.seed);
  auto log = [&](double at, sim::EventKind kind, std::string tag, std::int64_t subject, double value) {
    engine.schedule(at, kind, [](sim::Engine&, const sim::SimEvent&) {}, std::move(tag), subject, value);
  };

  std::vector<NodeId> nodes(static_cast<std::size_t>(cfg.nodes));
  for (int i = 0; i < cfg.nodes; ++i) nodes[static_cast<std::size_t>(i)] = i;

  // Training progress (minutes of useful compute) at each durable checkpoint.
  std::vector<double> durable_progress;
  double progress = 0;  // restored progress at the start of the current run
  double t = 0;
  std::size_t i = 0;
  while (t < cfg.horizon) {
    const double remaining = cfg.horizon - t;
    const Incident* inc = i < trace.size() ? &trace[i] : nullptr;
    const bool ends_run = inc && inc->after < remaining;
    const double run_len = ends_run ? inc->after : remaining;
    log(t, sim::EventKind::kStart, "run", static_cast<std::int64_t>(i), progress);

    // Saves whose nominal time falls after the incident never happen.
    std::vector<CheckpointRecord> taken;
    double run_blocked = 0;
    for (const auto& r : checkpoint_schedule(cfg.checkpoint, cfg.mode, run_len)) {
      if (r.taken_at > run_len) break;
      taken.push_back(r);
      run_blocked += r.blocked;
    }
    res.saves += static_cast<int>(taken.size());
    res.blocked_seconds += run_blocked;

    const double fail_at = ends_run ? inc->after : run_len;
    std::size_t durable_in_run = 0;
    for (std::size_t k = 0; k < taken.size(); ++k) {
      if (taken[k].durable_at <= fail_at) {
        durable_in_run = k + 1;
        log(t + taken[k].durable_at, sim::EventKind::kCheckpointDone, "checkpoint",
            static_cast<std::int64_t>(durable_progress.size()), progress + (k + 1) * interval);
        durable_progress.push_back(progress + static_cast<double>(k + 1) * interval);
      }
    }

    if (!ends_run) {
      // Horizon reached: count the progress made in the final run.
      progress += std::max(0.0, run_len - run_blocked / 60.0);
      break;
    }

    ++res.incidents;
    ++res.by_kind[std::string(to_string(inc->kind))];
    log(t + inc->after, sim::EventKind::kFail, inc->failure.reason, static_cast<std::int64_t>(i),
        inc->downtime);

    RecoveryContext ctx;
    ctx.nodes = nodes;
    ctx.rollback_depth = cfg.rollback_depth;
    for (double p : durable_progress) {
      ctx.checkpoint_steps.push_back(static_cast<long long>(std::llround(p * cfg.steps_per_minute)));
    }
    RecoveryAction action;
    if (inc->kind == IncidentKind::kLossSpike) {
      action = recovery_action(Anomaly::kLossSpike, ctx);
    } else if (inc->kind == IncidentKind::kHang) {
      action = recovery_action(Anomaly::kHang, ctx);
    } else {
      ctx.oracle = make_set_oracle(inc->failure.affected_nodes);
      action = recovery_action(diagnosis_for(inc->failure), ctx);
    }
    ++res.by_action[std::string(to_string(action.kind))];
    res.cordoned_nodes += static_cast<int>(action.nodes.size());
    res.unresolved_nodes += static_cast<int>(action.unresolved.size());

    const double restored =
        action.checkpoint_id >= 0 ? durable_progress[static_cast<std::size_t>(action.checkpoint_id)] : 0.0;
    if (action.checkpoint_id >= 0) {
      durable_progress.resize(static_cast<std::size_t>(action.checkpoint_id) + 1);
    } else {
      durable_progress.clear();
    }
    // Wall time that did not turn into retained progress.
    double retained_wall = 0;
    if (durable_in_run > 0 && restored > progress) {
      const std::size_t k = static_cast<std::size_t>(std::llround((restored - progress) / interval));
      retained_wall = taken[k - 1].taken_at;
    } else {
      retained_wall = restored - progress;  // <= 0: rolled back past this run
    }
    const double wasted = inc->after + inc->downtime - retained_wall;
    res.wasted_minutes += wasted;
    progress = restored;
    t += inc->after + inc->downtime;
    log(t, sim::EventKind::kRestartDone, std::string(to_string(action.kind)),
        static_cast<std::int64_t>(i), wasted);
    ++i;
  }

  engine.run();
  res.event_log_hash = engine.log_hash();
  res.progress_minutes = progress;
  res.mean_wasted_minutes = res.incidents > 0 ? res.wasted_minutes / res.incidents : 0.0;
  res.goodput = cfg.horizon > 0 ? progress / cfg.horizon : 0.0;
  return res;
}

}  // namespace acme::ft
