#include "acme/trace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "acme/common/error.hpp"
#include "acme/common/rng.hpp"

namespace acme::trace {

SyntheticClusterSpec SyntheticClusterSpec::kalos_like(std::size_t jobs) {
  SyntheticClusterSpec s;
  s.cluster = "Kalos";
  s.jobs = jobs;
  s.pretrain_count_share = 0.032;
  s.pretrain_gpu_time_share = 0.940;
  s.eval_count_share = 0.929;
  s.eval_gpu_time_share = 0.008;
  s.debug_count_share = 0.030;
  s.cpu_jobs = jobs / 5;
  return s;
}

SyntheticClusterSpec SyntheticClusterSpec::seren_like(std::size_t jobs) {
  SyntheticClusterSpec s;
  s.cluster = "Seren";
  s.jobs = jobs;
  s.pretrain_count_share = 0.009;
  s.pretrain_gpu_time_share = 0.695;
  s.eval_count_share = 0.620;
  s.eval_gpu_time_share = 0.030;
  s.sft_count_share = 0.120;
  s.mllm_count_share = 0.050;
  s.debug_count_share = 0.120;
  return s;
}

namespace {

std::int64_t pick(Rng& rng, std::initializer_list<std::int64_t> values) {
  const auto i = rng.below(values.size());
  return *(values.begin() + static_cast<std::ptrdiff_t>(i));
}

std::int64_t gpu_demand(Rng& rng, WorkloadType w) {
  switch (w) {
    case WorkloadType::kPretraining: return pick(rng, {256, 512, 1024, 1024, 2048});
    case WorkloadType::kEvaluation: {
      const double u = rng.uniform();
      return u < 0.70 ? 1 : (u < 0.95 ? 8 : 16);
    }
    case WorkloadType::kSft: return pick(rng, {8, 16, 32, 64});
    case WorkloadType::kMllm: return pick(rng, {8, 16, 32, 64, 128});
    case WorkloadType::kDebug: return pick(rng, {1, 2, 4, 8, 16});
    case WorkloadType::kOther: return pick(rng, {1, 1, 2, 4, 8});
  }
  return 1;
}

double lognormal(Rng& rng, double median, double sigma) {
  return median * std::exp(sigma * rng.normal());
}

const char* name_stem(WorkloadType w, Rng& rng) {
  switch (w) {
    case WorkloadType::kPretraining: return "pretrain-llm";
    case WorkloadType::kEvaluation: {
      static const char* kBench[] = {"eval-humaneval", "eval-mmlu", "eval-gsm8k", "eval-ceval", "eval-bbh",
                                     "eval-triviaqa"};
      return kBench[rng.below(6)];
    }
    case WorkloadType::kSft: return "sft-chat";
    case WorkloadType::kMllm: return "mllm-vision";
    case WorkloadType::kDebug: return "debug-run";
    case WorkloadType::kOther: return "job";
  }
  return "job";
}

struct Draft {
  WorkloadType workload = WorkloadType::kOther;
  FinalStatus state = FinalStatus::kCompleted;
  std::int64_t gpus = 1;
  std::int64_t duration = 0;
  bool started = true;
};

double gpu_time(const Draft& d) { return d.started ? static_cast<double>(d.gpus * d.duration) : 0.0; }

}  // namespace

std::vector<JobRecord> synthetic_trace(const SyntheticClusterSpec& spec, std::uint64_t seed) {
  if (spec.jobs < 10) throw Error(ErrorCode::kInvalid, "synthetic trace needs at least 10 jobs");
  Rng rng(seed);
  const auto count = [&](double share) {
    return static_cast<std::size_t>(std::llround(share * static_cast<double>(spec.jobs)));
  };
  const std::size_t n_pre = std::max<std::size_t>(count(spec.pretrain_count_share), 1);
  const std::size_t n_eval = count(spec.eval_count_share);
  const std::size_t n_sft = count(spec.sft_count_share);
  const std::size_t n_mllm = count(spec.mllm_count_share);
  const std::size_t n_debug = count(spec.debug_count_share);
  if (n_pre + n_eval + n_sft + n_mllm + n_debug > spec.jobs) {
    throw Error(ErrorCode::kInvalid, "synthetic count shares exceed 1");
  }

  std::vector<Draft> jobs(spec.jobs);
  std::size_t k = 0;
  auto assign = [&](std::size_t n, WorkloadType w) {
    for (std::size_t i = 0; i < n; ++i) jobs[k++].workload = w;
  };
  assign(n_pre, WorkloadType::kPretraining);
  assign(n_eval, WorkloadType::kEvaluation);
  assign(n_sft, WorkloadType::kSft);
  assign(n_mllm, WorkloadType::kMllm);
  assign(n_debug, WorkloadType::kDebug);
  assign(spec.jobs - k, WorkloadType::kOther);
  for (auto& j : jobs) j.gpus = gpu_demand(rng, j.workload);

  // Pretraining: 30% failed, 20% completed, the rest canceled.
  const std::size_t pre_failed = n_pre * 3 / 10;
  const std::size_t pre_completed = std::max<std::size_t>(n_pre * 2 / 10, 1);
  for (std::size_t i = 0; i < n_pre; ++i) {
    jobs[i].state = i < pre_failed ? FinalStatus::kFailed
                    : i < pre_failed + pre_completed ? FinalStatus::kCompleted
                                                     : FinalStatus::kCanceled;
  }
  const std::size_t pre_canceled = n_pre - pre_failed - pre_completed;

  // Remaining statuses over the other jobs, in shuffled order.
  std::vector<std::size_t> rest;
  for (std::size_t i = n_pre; i < spec.jobs; ++i) rest.push_back(i);
  for (std::size_t i = rest.size(); i > 1; --i) std::swap(rest[i - 1], rest[rng.below(i)]);
  const std::size_t failed = count(spec.failed_count_share);
  const std::size_t canceled = count(spec.canceled_count_share);
  const std::size_t np_failed = failed > pre_failed ? failed - pre_failed : 0;
  const std::size_t np_canceled = canceled > pre_canceled ? canceled - pre_canceled : 0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    Draft& d = jobs[rest[i]];
    d.state = i < np_failed                 ? FinalStatus::kFailed
              : i < np_failed + np_canceled ? FinalStatus::kCanceled
                                            : FinalStatus::kCompleted;
  }

  // Non-pretraining durations; failures end early, some cancellations never start.
  for (std::size_t i = n_pre; i < spec.jobs; ++i) {
    Draft& d = jobs[i];
    double median = 150;
    double sigma = 1.0;
    switch (d.workload) {
      case WorkloadType::kEvaluation: median = 150; sigma = 0.9; break;
      case WorkloadType::kSft: median = 3600; sigma = 1.2; break;
      case WorkloadType::kMllm: median = 1800; sigma = 1.3; break;
      case WorkloadType::kDebug: median = 300; sigma = 1.2; break;
      default: break;
    }
    if (d.state == FinalStatus::kFailed) median *= 0.6;
    if (d.state == FinalStatus::kCanceled && rng.uniform() < 0.1) d.started = false;
    d.duration = std::max<std::int64_t>(1, std::llround(lognormal(rng, median, sigma)));
  }

  // Scale non-evaluation, non-pretraining work to meet the evaluation share.
  double g_eval = 0;
  double g_other = 0;
  for (std::size_t i = n_pre; i < spec.jobs; ++i) {
    (jobs[i].workload == WorkloadType::kEvaluation ? g_eval : g_other) += gpu_time(jobs[i]);
  }
  const double np_share = 1.0 - spec.pretrain_gpu_time_share;
  const double eval_within = spec.eval_gpu_time_share / np_share;
  if (g_other > 0 && eval_within < 1.0) {
    const double factor = g_eval * (1.0 - eval_within) / (eval_within * g_other);
    for (std::size_t i = n_pre; i < spec.jobs; ++i) {
      Draft& d = jobs[i];
      if (d.workload == WorkloadType::kEvaluation) continue;
      d.duration = std::max<std::int64_t>(1, std::llround(static_cast<double>(d.duration) * factor));
    }
  }
  double g_np = 0;
  double completed_np = 0;
  double failed_np = 0;
  for (std::size_t i = n_pre; i < spec.jobs; ++i) {
    const double g = gpu_time(jobs[i]);
    g_np += g;
    if (jobs[i].state == FinalStatus::kCompleted) completed_np += g;
    if (jobs[i].state == FinalStatus::kFailed) failed_np += g;
  }
  const double total = g_np / np_share;
  const double pre_total = total - g_np;
  double budget[3];  // indexed by FinalStatus
  budget[static_cast<int>(FinalStatus::kCompleted)] =
      std::clamp(spec.completed_gpu_time_share * total - completed_np, 0.0, pre_total);
  budget[static_cast<int>(FinalStatus::kFailed)] =
      std::clamp(spec.failed_gpu_time_share * total - failed_np, 0.0,
                 pre_total - budget[static_cast<int>(FinalStatus::kCompleted)]);
  budget[static_cast<int>(FinalStatus::kCanceled)] = pre_total -
                                                     budget[static_cast<int>(FinalStatus::kCompleted)] -
                                                     budget[static_cast<int>(FinalStatus::kFailed)];

  std::vector<double> weight(n_pre);
  double weight_sum[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n_pre; ++i) {
    weight[i] = std::exp(rng.normal());
    weight_sum[static_cast<int>(jobs[i].state)] += weight[i];
  }
  for (std::size_t i = 0; i < n_pre; ++i) {
    Draft& d = jobs[i];
    const int s = static_cast<int>(d.state);
    d.duration = std::max<std::int64_t>(
        1, std::llround(budget[s] * weight[i] / weight_sum[s] / static_cast<double>(d.gpus)));
  }

  // Submit times over 30 days. Evaluation jobs queue longest (low priority,
  // bursty submission); pretraining holds reserved quota.
  constexpr std::int64_t kEpoch = 1688169600;  // 2023-07-01T00:00:00Z
  std::vector<JobRecord> out;
  out.reserve(spec.jobs);
  for (auto& d : jobs) {
    JobRecord r;
    r.cluster = ClusterId::parse(spec.cluster);
    r.workload = d.workload;
    r.state = d.state;
    r.gpu_num = d.gpus;
    r.cpu_num = d.gpus * 16;
    r.node_num = (d.gpus + 7) / 8;
    r.submit_time = kEpoch + static_cast<std::int64_t>(rng.below(30 * 86400));
    const double q_median = d.workload == WorkloadType::kEvaluation    ? 240.0
                            : d.workload == WorkloadType::kPretraining ? 60.0
                                                                       : 5.0 + 2.0 * static_cast<double>(d.gpus);
    if (d.started) {
      const std::int64_t delay = std::llround(lognormal(rng, q_median, 1.0));
      r.start_time = r.submit_time + delay;
      r.end_time = *r.start_time + d.duration;
    }
    r.name = std::string(name_stem(d.workload, rng));
    out.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < spec.cpu_jobs; ++i) {
    JobRecord r;
    r.cluster = ClusterId::parse(spec.cluster);
    r.workload = WorkloadType::kOther;
    r.state = rng.uniform() < 0.9 ? FinalStatus::kCompleted : FinalStatus::kFailed;
    r.cpu_num = static_cast<std::int64_t>(4 << rng.below(4));
    r.node_num = 1;
    r.submit_time = kEpoch + static_cast<std::int64_t>(rng.below(30 * 86400));
    r.start_time = r.submit_time + std::llround(lognormal(rng, 3.0, 1.0));
    r.end_time = *r.start_time + std::max<std::int64_t>(1, std::llround(lognormal(rng, 600.0, 1.2)));
    r.name = std::string("data-process");
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const JobRecord& a, const JobRecord& b) { return a.submit_time < b.submit_time; });
  char id[48];
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::snprintf(id, sizeof id, "%c%06zu", spec.cluster.empty() ? 'x' : static_cast<char>(std::tolower(static_cast<unsigned char>(spec.cluster[0]))), i + 1);
    out[i].job_id = id;
    *out[i].name += "-" + std::to_string(i + 1);
  }
  return out;
}

}  // namespace acme::trace
