#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acme/sched/dispatch.hpp"

namespace acme::sched {

struct SchedJob {
  std::string id;
  trace::WorkloadType workload = trace::WorkloadType::kOther;
  int gpu_num = 1;
  double submit_time = 0;
  double runtime = 0;  // seconds of uninterrupted execution
};

struct JobOutcome {
  std::string id;
  trace::WorkloadType workload = trace::WorkloadType::kOther;
  double submit_time = 0;
  double first_start = -1;
  double finish = -1;
  int preemptions = 0;
  double lost_seconds = 0;  // progress discarded by preemptions

  double queuing_delay() const { return first_start - submit_time; }

  friend bool operator==(const JobOutcome&, const JobOutcome&) = default;
};

struct ReplayOptions {
  Quota quota;
  sim::PlacementPolicy policy = sim::PlacementPolicy::kBestFit;
  // Preempted best-effort jobs resume from their progress instead of zero.
  bool checkpoint_best_effort = false;
  std::uint64_t seed = 0;
};

struct ReplayResult {
  std::vector<JobOutcome> outcomes;  // input order
  int preemptions = 0;
  double makespan = 0;
  std::uint64_t event_log_hash = 0;
  std::size_t events = 0;

  friend bool operator==(const ReplayResult&, const ReplayResult&) = default;
};

// Runs the jobs through the quota scheduler on a simulated cluster. Jobs
// larger than the cluster are rejected with ErrorCode::kInfeasible.
ReplayResult replay_schedule(const std::vector<SchedJob>& jobs, int node_count, int gpus_per_node,
                             const ReplayOptions& options);

// Synthetic mixed workload for a `node_count` x 8 cluster: a few large
// pretraining jobs and batches of small evaluation jobs submitted together,
// plus debug jobs.
std::vector<SchedJob> synthetic_mixed_workload(std::uint64_t seed, int node_count,
                                               double horizon_seconds);

}  // namespace acme::sched
