#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acme/ft/checkpoint.hpp"
#include "acme/ft/failure_model.hpp"
#include "acme/ft/recovery.hpp"

namespace acme::ft {

enum class IncidentKind { kFailure, kLossSpike, kHang };
std::string_view to_string(IncidentKind k);

struct Incident {
  IncidentKind kind = IncidentKind::kFailure;
  FailureEvent failure;  // reason "Loss Spike" or "Hang" for anomalies
  double after = 0;      // minutes since the run (re)started
  double downtime = 0;   // minutes until the next run starts
};

struct CampaignConfig {
  double horizon = 14 * 24 * 60;  // wall-clock minutes
  int nodes = 32;
  CheckpointConfig checkpoint;
  CheckpointMode mode = CheckpointMode::kAsync;
  int rollback_depth = 1;
  double loss_spikes_per_day = 0.2;
  double hangs_per_day = 0.1;
  double hang_detect = 30;     // minutes of silence before a hang is declared
  double anomaly_restart = 5;  // minutes
  double steps_per_minute = 6;
  std::uint64_t seed = 0;
};

// Incident sequence shared by every checkpoint configuration: run i ends
// with incident i. Only seed, failure model, anomaly rates and node count
// shape it.
std::vector<Incident> incident_trace(const FailureModel& model, const CampaignConfig& cfg);

struct CampaignResult {
  double interval = 0;
  CheckpointMode mode = CheckpointMode::kAsync;
  int incidents = 0;
  std::map<std::string, int> by_kind;
  std::map<std::string, int> by_action;
  int cordoned_nodes = 0;
  int unresolved_nodes = 0;
  int saves = 0;
  double wasted_minutes = 0;
  double mean_wasted_minutes = 0;
  double blocked_seconds = 0;
  double progress_minutes = 0;
  double goodput = 0;  // retained training progress / horizon
  std::uint64_t event_log_hash = 0;

  friend bool operator==(const CampaignResult&, const CampaignResult&) = default;
};

CampaignResult run_campaign(const std::vector<Incident>& trace, const CampaignConfig& cfg);

}  // namespace acme::ft
