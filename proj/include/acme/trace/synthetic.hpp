#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acme/trace/job_record.hpp"

namespace acme::trace {

// Shape targets for one cluster of a synthetic trace. Count shares are hit
// exactly (up to rounding); GPU-time shares are met by construction.
struct SyntheticClusterSpec {
  std::string cluster;
  std::size_t jobs = 0;  // GPU jobs
  double pretrain_count_share = 0;
  double pretrain_gpu_time_share = 0;
  double eval_count_share = 0;
  double eval_gpu_time_share = 0;
  double sft_count_share = 0;
  double mllm_count_share = 0;
  double debug_count_share = 0;
  double failed_count_share = 0.40;
  double canceled_count_share = 0.07;
  double completed_gpu_time_share = 0.25;
  double failed_gpu_time_share = 0.10;
  // CPU-only jobs (gpu_num = 0) appended after the GPU jobs are drawn.
  std::size_t cpu_jobs = 0;

  static SyntheticClusterSpec kalos_like(std::size_t jobs);
  static SyntheticClusterSpec seren_like(std::size_t jobs);
};

// Deterministic for a given (spec, seed). Records are sorted by submit time.
std::vector<JobRecord> synthetic_trace(const SyntheticClusterSpec& spec, std::uint64_t seed);

}  // namespace acme::trace
