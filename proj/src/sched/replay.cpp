#include "acme/sched/replay.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"
#include "acme/sim/engine.hpp"

namespace acme::sched {

namespace {

class Replayer {
 public:
  Replayer(const std::vector<SchedJob>& jobs, int node_count, int gpus_per_node,
           const ReplayOptions& options)
      : jobs_(jobs),
        options_(options),
        cluster_(node_count, gpus_per_node),
        engine_(options.seed),
        remaining_(jobs.size()),
        finish_event_(jobs.size(), 0) {
    options.quota.validate(node_count);
    result_.outcomes.resize(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& j = jobs[i];
      if (j.gpu_num < 1 || j.gpu_num > cluster_.total_gpus()) {
        throw Error(ErrorCode::kInfeasible, "job " + j.id + " cannot fit the cluster");
      }
      index_[j.id] = i;
      remaining_[i] = j.runtime;
      auto& o = result_.outcomes[i];
      o.id = j.id;
      o.workload = j.workload;
      o.submit_time = j.submit_time;
    }
  }

  ReplayResult run() {
    // Submit in time order; equal times keep input order.
    std::vector<std::size_t> order(jobs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return jobs_[a].submit_time < jobs_[b].submit_time;
    });
    for (std::size_t i : order) {
      engine_.schedule(jobs_[i].submit_time, sim::EventKind::kSubmit,
                       [this, i](sim::Engine&, const sim::SimEvent&) { on_submit(i); },
                       jobs_[i].id, static_cast<std::int64_t>(i));
    }
    engine_.run();
    for (const auto& o : result_.outcomes) result_.makespan = std::max(result_.makespan, o.finish);
    result_.event_log_hash = engine_.log_hash();
    result_.events = engine_.log().size();
    return std::move(result_);
  }

 private:
  PendingJob pending(std::size_t i) const {
    return PendingJob{jobs_[i].id, jobs_[i].workload, jobs_[i].gpu_num, jobs_[i].submit_time};
  }

  void on_submit(std::size_t i) {
    queues_.push(pending(i));
    schedule_pass();
  }

  void on_finish(std::size_t i) {
    auto it = std::find_if(running_.begin(), running_.end(),
                           [&](const RunningJob& r) { return r.id == jobs_[i].id; });
    cluster_.release(it->placement);
    running_.erase(it);
    result_.outcomes[i].finish = engine_.now();
    remaining_[i] = 0;
    schedule_pass();
  }

  void remove_from_queue(const std::string& id) {
    for (auto* q : {&queues_.pretraining, &queues_.general}) {
      auto it = std::find_if(q->begin(), q->end(), [&](const PendingJob& p) { return p.id == id; });
      if (it != q->end()) {
        q->erase(it);
        return;
      }
    }
  }

  void preempt(const std::string& id) {
    const std::size_t i = index_.at(id);
    auto it = std::find_if(running_.begin(), running_.end(),
                           [&](const RunningJob& r) { return r.id == id; });
    engine_.cancel(finish_event_[i]);
    cluster_.release(it->placement);
    const double progress = engine_.now() - it->start_time;
    running_.erase(it);
    auto& o = result_.outcomes[i];
    ++o.preemptions;
    ++result_.preemptions;
    if (options_.checkpoint_best_effort) {
      remaining_[i] = std::max(0.0, remaining_[i] - progress);
    } else {
      o.lost_seconds += progress;
      remaining_[i] = jobs_[i].runtime;
    }
    engine_.schedule_in(0, sim::EventKind::kCustom, nullptr, "preempt:" + id,
                        static_cast<std::int64_t>(i));
    queues_.requeue(pending(i));
  }

  void schedule_pass() {
    bool started = true;
    while (started) {
      started = false;
      const auto decisions = dispatch(queues_, cluster_, running_, options_.quota, options_.policy);
      for (const auto& d : decisions) {
        if (d.action == DispatchDecision::Action::kQueue) continue;
        for (const auto& victim : d.victims) preempt(victim);
        const std::size_t i = index_.at(d.job_id);
        remove_from_queue(d.job_id);
        cluster_.claim(d.placement);
        running_.push_back(RunningJob{d.job_id, d.placement, d.best_effort, engine_.now()});
        auto& o = result_.outcomes[i];
        if (o.first_start < 0) o.first_start = engine_.now();
        engine_.schedule_in(0, sim::EventKind::kStart, nullptr, d.job_id,
                            static_cast<std::int64_t>(i), d.best_effort ? 1.0 : 0.0);
        finish_event_[i] = engine_.schedule_in(
            remaining_[i], sim::EventKind::kFinish,
            [this, i](sim::Engine&, const sim::SimEvent&) { on_finish(i); }, d.job_id,
            static_cast<std::int64_t>(i));
        started = true;
      }
    }
  }

  const std::vector<SchedJob>& jobs_;
  ReplayOptions options_;
  sim::ClusterState cluster_;
  sim::Engine engine_;
  QueueState queues_;
  std::vector<RunningJob> running_;
  std::vector<double> remaining_;
  std::vector<std::uint64_t> finish_event_;
  std::map<std::string, std::size_t> index_;
  ReplayResult result_;
};

}  // namespace

ReplayResult replay_schedule(const std::vector<SchedJob>& jobs, int node_count, int gpus_per_node,
                             const ReplayOptions& options) {
  Replayer r(jobs, node_count, gpus_per_node, options);
  return r.run();
}

std::vector<SchedJob> synthetic_mixed_workload(std::uint64_t seed, int node_count,
                                               double horizon_seconds) {
  Rng rng(seed);
  std::vector<SchedJob> jobs;
  int next = 0;
  auto add = [&](trace::WorkloadType w, int gpus, double submit, double runtime) {
    jobs.push_back(SchedJob{std::string(trace::to_string(w)) + "-" + std::to_string(next++), w,
                            gpus, std::floor(submit), std::max(1.0, std::floor(runtime))});
  };
  const int total_gpus = node_count * 8;

  // Pretraining: a handful of large jobs, several nodes each.
  for (double t = 0; t < horizon_seconds; t += rng.uniform(4, 8) * 3600) {
    const int nodes = std::max(1, static_cast<int>(node_count / 4 + rng.below(node_count / 4 + 1)));
    add(trace::WorkloadType::kPretraining, std::min(total_gpus, nodes * 8), t,
        3600 * std::exp(1.5 + 0.6 * rng.normal()));
  }
  // Evaluation: batches submitted together against each new checkpoint.
  for (double t = 600; t < horizon_seconds; t += rng.uniform(1, 3) * 3600) {
    const int batch = 40 + static_cast<int>(rng.below(120));
    for (int k = 0; k < batch; ++k) {
      add(trace::WorkloadType::kEvaluation, 1 << rng.below(3), t,
          60 * std::exp(std::log(8.0) + 0.8 * rng.normal()));
    }
  }
  // Debug: a steady trickle.
  for (double t = rng.exponential(1200); t < horizon_seconds; t += rng.exponential(1200)) {
    add(trace::WorkloadType::kDebug, 1 << rng.below(5), t,
        60 * std::exp(std::log(15.0) + 0.7 * rng.normal()));
  }
  std::stable_sort(jobs.begin(), jobs.end(),
                   [](const SchedJob& a, const SchedJob& b) { return a.submit_time < b.submit_time; });
  return jobs;
}

}  // namespace acme::sched
