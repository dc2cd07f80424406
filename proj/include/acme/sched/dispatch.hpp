#pragma once

#include <deque>
#include <string>
#include <vector>

#include "acme/sim/cluster.hpp"
#include "acme/trace/job_record.hpp"

namespace acme::sched {

// Nodes [0, reserved_nodes) belong to the pretraining quota. With
// `preemptible` set, other jobs may borrow idle reserved nodes as best-effort
// occupants and are killed when pretraining needs the room back.
struct Quota {
  int reserved_nodes = 0;
  bool preemptible = true;

  void validate(int node_count) const;
};

struct PendingJob {
  std::string id;
  trace::WorkloadType workload = trace::WorkloadType::kOther;
  int gpu_num = 1;
  double submit_time = 0;
};

struct RunningJob {
  std::string id;
  sim::Placement placement;
  bool best_effort = false;  // non-pretraining job sitting on reserved nodes
  double start_time = 0;
};

// FIFO per class: pretraining first, then everything else.
struct QueueState {
  std::deque<PendingJob> pretraining;
  std::deque<PendingJob> general;

  void push(PendingJob job);
  // Re-inserts a preempted job at its original submit-order position.
  void requeue(PendingJob job);
  std::size_t size() const { return pretraining.size() + general.size(); }
};

struct DispatchDecision {
  enum class Action { kStart, kQueue, kPreemptAndStart };

  std::string job_id;
  Action action = Action::kQueue;
  sim::Placement placement;
  std::vector<std::string> victims;  // best-effort jobs to kill first
  bool best_effort = false;
};

bool is_reserved_class(trace::WorkloadType w);

// Pure decision function; the caller applies the decisions. Jobs are visited
// in FIFO order within each class and every feasible job starts (no
// head-of-line blocking), so no job waits while it fits in free capacity.
std::vector<DispatchDecision> dispatch(const QueueState& queues, const sim::ClusterState& cluster,
                                       const std::vector<RunningJob>& running, const Quota& quota,
                                       sim::PlacementPolicy policy = sim::PlacementPolicy::kBestFit);

}  // namespace acme::sched
