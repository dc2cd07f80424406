#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "acme/common/kv_config.hpp"
#include "acme/eval/dataset.hpp"
#include "acme/sim/model_memory.hpp"

namespace acme::eval {

enum class EvalMode { kBaseline, kDecoupled };
std::string_view to_string(EvalMode m);

enum class PhaseKind {
  kRemoteLoad,
  kPrecursorLoad,
  kLocalLoad,
  kInference,
  kDump,
  kGpuMetric,
  kCpuMetric,
};
std::string_view to_string(PhaseKind k);
bool parse_phase_kind(std::string_view s, PhaseKind& out);

// Timing of model loads and per-trial fixed costs.
struct LoadModel {
  double model_bytes = 14e9;  // parameters only, 2 x psi
  double storage_nic_gbps = 25;
  double storage_aggregate_gbps = 3200;
  double local_gbps = 128;  // shared memory to GPU
  // Framework start-up and tokenization paid by every trial.
  double trial_setup_seconds = 28.5;
  double dump_seconds = 2;

  static LoadModel for_model(const sim::ModelShape& shape);
  // Keys under `eval.`: model_psi, storage_nic_gbps, storage_aggregate_gbps,
  // local_gbps, trial_setup_s, dump_s.
  static LoadModel from_config(const KvConfig& cfg);
  // Throws kConfig.
  void validate() const;

  double remote_solo_seconds() const;
  double local_seconds() const;
};

struct Phase {
  PhaseKind kind = PhaseKind::kInference;
  int gpu = -1;  // -1 for CPU pool phases
  int node = 0;
  std::string dataset;
  int shard = 0;
  int shards = 1;
  std::int64_t inference_ticks = 0;
  double metric_minutes = 0;
  double start = 0;  // seconds
  double end = 0;

  friend bool operator==(const Phase&, const Phase&) = default;
};

struct TrialPlan {
  EvalMode mode = EvalMode::kBaseline;
  int nodes = 1;
  int gpus_per_node = 8;
  std::vector<std::vector<Phase>> gpu_phases;  // one lane per GPU
  std::vector<Phase> cpu_phases;
  std::string packing;  // decoupled: "lpt" or "list"

  int gpus() const { return static_cast<int>(gpu_phases.size()); }
  int node_of(int gpu) const { return gpu / gpus_per_node; }
  std::int64_t inference_ticks() const;
  // Throws kInvalid on overlapping phases within a lane.
  void validate() const;

  friend bool operator==(const TrialPlan&, const TrialPlan&) = default;
};

struct QueueEntry {
  std::string name;
  double runtime_minutes = 0;
  double metric_minutes = 0;
};

// Longest runtime first; equal runtimes put the longer metric first; then name.
std::vector<QueueEntry> prioritize_queue(std::vector<QueueEntry> entries);

// Greedy: each entry, in order, goes to the least-loaded GPU (lowest index on
// ties). Returns entry indices per GPU.
std::vector<std::vector<std::size_t>> least_loaded_assign(const std::vector<double>& costs, int gpus);

struct PlanOptions {
  double split_factor = 2.0;  // split when prior > factor x mean per-GPU load
};

// gpus are spread over nodes, ceil(gpus / nodes) per node. Phase times are
// nominal: loads assume no contention.
TrialPlan plan_trials(const std::vector<EvalDataset>& datasets, int gpus, int nodes, EvalMode mode,
                      const LoadModel& load, const PlanOptions& options = {});

struct SimOptions {
  int cpu_slots = 0;  // concurrent CPU metric jobs; 0 = unbounded
};

struct EvalResult {
  TrialPlan timeline;  // the plan with simulated start/end
  double makespan = 0;    // seconds, last GPU phase end
  double completion = 0;  // seconds, including CPU metric phases
  std::vector<double> gpu_idle_fraction;
  double mean_idle_fraction = 0;
  double gpu_busy_seconds = 0;
  double inference_seconds = 0;
  std::uint64_t event_log_hash = 0;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

// Replays the plan on the event engine. Remote and precursor loads share the
// node's storage NIC and the storage backend max-min fairly.
EvalResult simulate_eval(const TrialPlan& plan, const LoadModel& load, const SimOptions& options = {});

}  // namespace acme::eval
