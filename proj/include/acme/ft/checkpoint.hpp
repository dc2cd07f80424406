#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acme/common/kv_config.hpp"
#include "acme/sim/model_memory.hpp"

namespace acme::ft {

enum class CheckpointMode { kSync, kAsync };
std::string_view to_string(CheckpointMode m);

struct CheckpointConfig {
  double interval = 30;        // minutes
  double t_block_sync = 120;   // seconds
  double t_block_async = 2;    // seconds
  double persist_time = 100;   // seconds
  int host_memory_slots = 2;

  // Throws kConfig.
  void validate() const;
  // Keys under `prefix.`: interval_min, t_block_sync_s, t_block_async_s,
  // persist_time_s, host_memory_slots, or a `calibration.*` block.
  static CheckpointConfig from_config(const KvConfig& cfg, const std::string& prefix = "checkpoint");
};

// Cost model behind the shipped calibrations. Sync saves stall training for
// the full write to remote storage; async saves stall for the device-to-host
// copy of each GPU's shard.
struct CheckpointCalibration {
  std::string name;
  sim::ModelShape model;
  int gpus = 8;
  double storage_write_gbps = 200;  // effective write bandwidth of the job
  double pcie_gbps = 128;           // per-GPU device-to-host
  double sync_fixed_s = 3;          // serialization and barrier
  double async_fixed_s = 1.5;

  CheckpointConfig derive(double interval_min, int host_memory_slots = 2) const;
  static CheckpointCalibration from_config(const KvConfig& cfg, const std::string& prefix);
};

struct CheckpointOverhead {
  double blocked_seconds = 0;
  double blocked_fraction = 0;
  int saves = 0;

  friend bool operator==(const CheckpointOverhead&, const CheckpointOverhead&) = default;
};

struct CheckpointRecord {
  double taken_at = 0;    // minutes, nominal save time
  double durable_at = 0;  // minutes, persist finished
  double blocked = 0;     // seconds of training stall for this save

  friend bool operator==(const CheckpointRecord&, const CheckpointRecord&) = default;
};

// floor(horizon/interval) saves on a wall-clock timeline: save k comes
// `interval` of training after the previous save's stall. Async persists
// run FIFO on one background writer; a save blocks extra when every
// host-memory slot still holds an unpersisted snapshot.
std::vector<CheckpointRecord> checkpoint_schedule(const CheckpointConfig& cfg, CheckpointMode mode,
                                                  double horizon);

CheckpointOverhead checkpoint_overhead(const CheckpointConfig& cfg, CheckpointMode mode,
                                       double horizon);

// completed: sorted times of checkpoints durable before the failure.
double wasted_time(double failure_at, std::span<const double> completed, double restart_time);
// Uses only records whose durable_at <= failure_at.
double wasted_time(double failure_at, std::span<const CheckpointRecord> records, double restart_time);

}  // namespace acme::ft
