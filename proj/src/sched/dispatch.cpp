#include "acme/sched/dispatch.hpp"

#include <algorithm>

#include "acme/common/error.hpp"

namespace acme::sched {

void Quota::validate(int node_count) const {
  if (reserved_nodes < 0 || reserved_nodes > node_count) {
    throw Error(ErrorCode::kConfig, "quota: reserved_nodes must lie in [0, node_count]");
  }
}

namespace {

void insert_by_submit(std::deque<PendingJob>& q, PendingJob job) {
  auto it = std::upper_bound(q.begin(), q.end(), job, [](const PendingJob& a, const PendingJob& b) {
    return a.submit_time < b.submit_time;
  });
  q.insert(it, std::move(job));
}

std::optional<sim::Placement> try_find(const sim::ClusterState& c, int gpus,
                                       sim::PlacementPolicy policy, const std::vector<bool>* mask) {
  try {
    return c.find(gpus, policy, mask);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInfeasible) return std::nullopt;
    throw;
  }
}

}  // namespace

void QueueState::push(PendingJob job) {
  if (is_reserved_class(job.workload)) {
    pretraining.push_back(std::move(job));
  } else {
    general.push_back(std::move(job));
  }
}

void QueueState::requeue(PendingJob job) {
  insert_by_submit(is_reserved_class(job.workload) ? pretraining : general, std::move(job));
}

bool is_reserved_class(trace::WorkloadType w) { return w == trace::WorkloadType::kPretraining; }

std::vector<DispatchDecision> dispatch(const QueueState& queues, const sim::ClusterState& cluster,
                                       const std::vector<RunningJob>& running, const Quota& quota,
                                       sim::PlacementPolicy policy) {
  std::vector<DispatchDecision> decisions;
  sim::ClusterState work = cluster;
  const int nodes = cluster.node_count();
  std::vector<bool> reserved(nodes, false);
  std::vector<bool> shared(nodes, true);
  for (int n = 0; n < std::min(quota.reserved_nodes, nodes); ++n) {
    reserved[n] = true;
    shared[n] = false;
  }
  const bool has_reservation = quota.reserved_nodes > 0;

  // Best-effort occupants, newest first: the cheapest to kill.
  std::vector<const RunningJob*> evictable;
  for (const auto& r : running) {
    if (r.best_effort) evictable.push_back(&r);
  }
  std::stable_sort(evictable.begin(), evictable.end(), [](const RunningJob* a, const RunningJob* b) {
    return a->start_time > b->start_time;
  });
  std::vector<bool> evicted(evictable.size(), false);

  for (const auto& job : queues.pretraining) {
    DispatchDecision d;
    d.job_id = job.id;
    const std::vector<bool>* primary = has_reservation ? &reserved : nullptr;
    auto p = try_find(work, job.gpu_num, policy, primary);
    if (!p && has_reservation) p = try_find(work, job.gpu_num, policy, nullptr);
    if (p) {
      d.action = DispatchDecision::Action::kStart;
    } else if (has_reservation) {
      // Kill best-effort occupants of reserved nodes until the job fits there.
      sim::ClusterState trial = work;
      std::vector<std::size_t> chosen;
      for (std::size_t i = 0; i < evictable.size() && !p; ++i) {
        if (evicted[i]) continue;
        trial.release(evictable[i]->placement);
        chosen.push_back(i);
        p = try_find(trial, job.gpu_num, policy, &reserved);
      }
      if (p) {
        // Drop victims that turned out to be unnecessary, oldest first.
        for (auto it = chosen.begin(); it != chosen.end();) {
          sim::ClusterState without = work;
          for (std::size_t j : chosen) {
            if (j != *it) without.release(evictable[j]->placement);
          }
          if (auto q = try_find(without, job.gpu_num, policy, &reserved)) {
            p = q;
            it = chosen.erase(it);
          } else {
            ++it;
          }
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i : chosen) {
          evicted[i] = true;
          work.release(evictable[i]->placement);
          d.victims.push_back(evictable[i]->id);
        }
        d.action = DispatchDecision::Action::kPreemptAndStart;
      }
    }
    if (p) {
      d.placement = *p;
      work.claim(*p);
    } else {
      d.action = DispatchDecision::Action::kQueue;
    }
    decisions.push_back(std::move(d));
  }

  for (const auto& job : queues.general) {
    DispatchDecision d;
    d.job_id = job.id;
    auto p = try_find(work, job.gpu_num, policy, has_reservation ? &shared : nullptr);
    if (!p && has_reservation && quota.preemptible) {
      p = try_find(work, job.gpu_num, policy, &reserved);
      d.best_effort = p.has_value();
    }
    if (p) {
      d.action = DispatchDecision::Action::kStart;
      d.placement = *p;
      work.claim(*p);
    } else {
      d.action = DispatchDecision::Action::kQueue;
    }
    decisions.push_back(std::move(d));
  }
  return decisions;
}

}  // namespace acme::sched
