#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"
#include "acme/sched/dispatch.hpp"
#include "acme/sched/replay.hpp"

namespace acme::sched {
namespace {

using trace::WorkloadType;
using Action = DispatchDecision::Action;

ReplayOptions with_quota(int reserved, bool preemptible = true) {
  ReplayOptions o;
  o.quota.reserved_nodes = reserved;
  o.quota.preemptible = preemptible;
  return o;
}

TEST(Replay, SingleJobOnEmptyClusterStartsImmediately) {
  const auto r = replay_schedule({{"e", WorkloadType::kEvaluation, 1, 10, 60}}, 2, 8, with_quota(0));
  ASSERT_EQ(r.outcomes.size(), 1u);
  EXPECT_EQ(r.outcomes[0].queuing_delay(), 0);
  EXPECT_EQ(r.outcomes[0].finish, 70);
  EXPECT_EQ(r.makespan, 70);
  EXPECT_EQ(r.preemptions, 0);
}

// Two 8-GPU nodes, node 0 reserved. A takes the shared node, B borrows the
// reserved node, P arrives at t=50 and evicts B, which restarts from zero on
// the shared node once A finishes.
TEST(Replay, PretrainingPreemptsBestEffortOccupant) {
  const std::vector<SchedJob> jobs{{"A", WorkloadType::kEvaluation, 8, 0, 100},
                                   {"B", WorkloadType::kEvaluation, 8, 0, 1000},
                                   {"P", WorkloadType::kPretraining, 8, 50, 100}};
  const auto r = replay_schedule(jobs, 2, 8, with_quota(1));
  EXPECT_EQ(r.preemptions, 1);
  const auto& a = r.outcomes[0];
  const auto& b = r.outcomes[1];
  const auto& p = r.outcomes[2];
  EXPECT_EQ(a.first_start, 0);
  EXPECT_EQ(a.finish, 100);
  EXPECT_EQ(b.first_start, 0);
  EXPECT_EQ(b.preemptions, 1);
  EXPECT_EQ(b.lost_seconds, 50);
  EXPECT_EQ(b.finish, 1100);
  EXPECT_EQ(p.first_start, 50);
  EXPECT_EQ(p.finish, 150);
  EXPECT_EQ(r.makespan, 1100);
}

TEST(Replay, CheckpointedBestEffortKeepsProgress) {
  const std::vector<SchedJob> jobs{{"A", WorkloadType::kEvaluation, 8, 0, 100},
                                   {"B", WorkloadType::kEvaluation, 8, 0, 1000},
                                   {"P", WorkloadType::kPretraining, 8, 50, 100}};
  auto opts = with_quota(1);
  opts.checkpoint_best_effort = true;
  const auto r = replay_schedule(jobs, 2, 8, opts);
  EXPECT_EQ(r.outcomes[1].lost_seconds, 0);
  EXPECT_EQ(r.outcomes[1].finish, 1050);
}

TEST(Replay, WithoutPreemptionBestEffortIsNotAllowed) {
  const std::vector<SchedJob> jobs{{"A", WorkloadType::kEvaluation, 8, 0, 100},
                                   {"B", WorkloadType::kEvaluation, 8, 0, 1000}};
  const auto r = replay_schedule(jobs, 2, 8, with_quota(1, false));
  EXPECT_EQ(r.outcomes[1].first_start, 100);
}

TEST(Replay, OversizedJobIsInfeasible) {
  try {
    replay_schedule({{"x", WorkloadType::kPretraining, 64, 0, 10}}, 2, 8, with_quota(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(Replay, DeterministicLogHash) {
  const auto jobs = synthetic_mixed_workload(5, 8, 12 * 3600);
  const auto a = replay_schedule(jobs, 8, 8, with_quota(4));
  const auto b = replay_schedule(jobs, 8, 8, with_quota(4));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.event_log_hash, replay_schedule(jobs, 8, 8, with_quota(2)).event_log_hash);
}

double median_delay(const ReplayResult& r, WorkloadType w) {
  std::vector<double> d;
  for (const auto& o : r.outcomes) {
    if (o.workload == w) d.push_back(o.queuing_delay());
  }
  std::sort(d.begin(), d.end());
  return d[(d.size() - 1) / 2];
}

TEST(Replay, HeavyReservationMakesEvaluationWaitLongest) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto jobs = synthetic_mixed_workload(seed, 16, 24 * 3600);
    const auto r = replay_schedule(jobs, 16, 8, with_quota(12));
    EXPECT_GT(median_delay(r, WorkloadType::kEvaluation), median_delay(r, WorkloadType::kPretraining)) << seed;
  }
}

TEST(Replay, EveryJobFinishesAfterItsRuntime) {
  const auto jobs = synthetic_mixed_workload(9, 16, 24 * 3600);
  const auto r = replay_schedule(jobs, 16, 8, with_quota(8));
  ASSERT_EQ(r.outcomes.size(), jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& o = r.outcomes[i];
    ASSERT_EQ(o.id, jobs[i].id);
    ASSERT_GE(o.first_start, jobs[i].submit_time);
    ASSERT_GE(o.finish - o.first_start, jobs[i].runtime + o.lost_seconds - 1e-9);
  }
}

struct RandomState {
  QueueState queues;
  sim::ClusterState cluster{1, 8};
  std::vector<RunningJob> running;
  Quota quota;
};

RandomState random_state(Rng& rng) {
  RandomState s;
  const int nodes = 2 + static_cast<int>(rng.below(6));
  s.cluster = sim::ClusterState(nodes, 8);
  s.quota.reserved_nodes = static_cast<int>(rng.below(nodes + 1));
  std::vector<bool> reserved(nodes, false);
  for (int n = 0; n < s.quota.reserved_nodes; ++n) reserved[n] = true;
  const int occupants = static_cast<int>(rng.below(8));
  for (int i = 0; i < occupants; ++i) {
    const int g = 1 << rng.below(4);
    const bool on_reserved = s.quota.reserved_nodes > 0 && rng.below(2) == 0;
    std::vector<bool> mask = reserved;
    if (!on_reserved) mask.flip();
    if (auto p = s.cluster.allocate(g, sim::PlacementPolicy::kBestFit, &mask)) {
      s.running.push_back({"r" + std::to_string(i), *p, on_reserved, static_cast<double>(i)});
    }
  }
  const int pending = static_cast<int>(rng.below(10));
  for (int i = 0; i < pending; ++i) {
    const auto w = rng.below(3) == 0 ? WorkloadType::kPretraining : WorkloadType::kEvaluation;
    const int g = w == WorkloadType::kPretraining ? 8 * (1 + static_cast<int>(rng.below(2))) : 1 << rng.below(4);
    s.queues.push({"q" + std::to_string(i), w, g, static_cast<double>(i)});
  }
  return s;
}

// Applies decisions in order and returns the cluster afterwards.
sim::ClusterState apply(const RandomState& s, const std::vector<DispatchDecision>& ds) {
  sim::ClusterState c = s.cluster;
  std::map<std::string, const RunningJob*> by_id;
  for (const auto& r : s.running) by_id[r.id] = &r;
  for (const auto& d : ds) {
    for (const auto& v : d.victims) c.release(by_id.at(v)->placement);
    if (d.action != Action::kQueue) c.claim(d.placement);
  }
  return c;
}

TEST(Dispatch, NoGeneralJobWaitsWhileItFitsOnSharedNodes) {
  Rng rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto s = random_state(rng);
    const auto ds = dispatch(s.queues, s.cluster, s.running, s.quota);
    ASSERT_EQ(ds.size(), s.queues.size());
    const auto after = apply(s, ds);
    std::vector<bool> shared(after.node_count(), true);
    for (int n = 0; n < s.quota.reserved_nodes; ++n) shared[n] = false;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds[i].action != Action::kQueue) continue;
      const auto& job = i < s.queues.pretraining.size() ? s.queues.pretraining[i]
                                                        : s.queues.general[i - s.queues.pretraining.size()];
      if (job.workload == WorkloadType::kPretraining) continue;
      if (job.gpu_num > after.total_gpus()) continue;
      ASSERT_FALSE(after.find(job.gpu_num, sim::PlacementPolicy::kBestFit, &shared).has_value()) << trial;
    }
  }
}

TEST(Dispatch, PretrainingNeverWaitsBehindBestEffort) {
  // The head pretraining job queues only when it would not fit on the
  // reserved nodes even with every best-effort occupant evicted.
  Rng rng(32);
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto s = random_state(rng);
    if (s.queues.pretraining.empty() || s.quota.reserved_nodes == 0) continue;
    const auto ds = dispatch(s.queues, s.cluster, s.running, s.quota);
    if (ds[0].action != Action::kQueue) continue;
    sim::ClusterState freed = s.cluster;
    for (const auto& r : s.running) {
      if (r.best_effort) freed.release(r.placement);
    }
    std::vector<bool> reserved(freed.node_count(), false);
    for (int n = 0; n < s.quota.reserved_nodes; ++n) reserved[n] = true;
    const int g = s.queues.pretraining.front().gpu_num;
    bool fits = false;
    try {
      fits = freed.find(g, sim::PlacementPolicy::kBestFit, &reserved).has_value();
    } catch (const Error&) {
    }
    ASSERT_FALSE(fits) << trial;
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Dispatch, VictimsAreBestEffortOnly) {
  Rng rng(33);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto s = random_state(rng);
    const auto ds = dispatch(s.queues, s.cluster, s.running, s.quota);
    for (const auto& d : ds) {
      for (const auto& v : d.victims) {
        const auto it = std::find_if(s.running.begin(), s.running.end(), [&](const RunningJob& r) { return r.id == v; });
        ASSERT_NE(it, s.running.end());
        ASSERT_TRUE(it->best_effort);
      }
      if (!d.victims.empty()) ASSERT_EQ(d.action, Action::kPreemptAndStart);
    }
  }
}

TEST(QueueState, RequeueKeepsSubmitOrder) {
  QueueState q;
  q.push({"a", WorkloadType::kEvaluation, 1, 1});
  q.push({"c", WorkloadType::kEvaluation, 1, 3});
  q.requeue({"b", WorkloadType::kEvaluation, 1, 2});
  q.push({"p", WorkloadType::kPretraining, 8, 0});
  ASSERT_EQ(q.general.size(), 3u);
  EXPECT_EQ(q.general[1].id, "b");
  EXPECT_EQ(q.pretraining.size(), 1u);
  EXPECT_EQ(q.size(), 4u);
}

TEST(Quota, Validation) {
  EXPECT_THROW((Quota{5, true}.validate(4)), Error);
  EXPECT_THROW((Quota{-1, true}.validate(4)), Error);
  EXPECT_NO_THROW((Quota{4, true}.validate(4)));
}

}  // namespace
}  // namespace acme::sched
