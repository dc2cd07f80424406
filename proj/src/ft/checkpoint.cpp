#include "acme/ft/checkpoint.hpp"

#include <algorithm>
#include <cmath>

#include "acme/common/error.hpp"

namespace acme::ft {

std::string_view to_string(CheckpointMode m) {
  return m == CheckpointMode::kSync ? "sync" : "async";
}

void CheckpointConfig::validate() const {
  if (!(interval > 0)) throw Error(ErrorCode::kConfig, "checkpoint interval must be > 0");
  if (!(t_block_async >= 0) || !(t_block_sync >= 0) || !(persist_time >= 0)) {
    throw Error(ErrorCode::kConfig, "checkpoint times must be >= 0");
  }
  if (t_block_async > t_block_sync) {
    throw Error(ErrorCode::kConfig, "t_block_async must not exceed t_block_sync");
  }
  // The background write moves the same bytes a sync save writes inline.
  if (persist_time > t_block_sync - t_block_async) {
    throw Error(ErrorCode::kConfig, "persist_time must not exceed t_block_sync - t_block_async");
  }
  if (host_memory_slots < 1) throw Error(ErrorCode::kConfig, "host_memory_slots must be >= 1");
}

CheckpointConfig CheckpointConfig::from_config(const KvConfig& cfg, const std::string& prefix) {
  const std::string p = prefix + ".";
  CheckpointConfig out;
  const double interval = cfg.get_double(p + "interval_min", out.interval);
  const int slots = static_cast<int>(cfg.get_int(p + "host_memory_slots", out.host_memory_slots));
  if (cfg.has(p + "calibration.psi")) {
    out = CheckpointCalibration::from_config(cfg, p + "calibration").derive(interval, slots);
  } else {
    out.interval = interval;
    out.host_memory_slots = slots;
    out.t_block_sync = cfg.get_double(p + "t_block_sync_s", out.t_block_sync);
    out.t_block_async = cfg.get_double(p + "t_block_async_s", out.t_block_async);
    out.persist_time = cfg.get_double(p + "persist_time_s", out.persist_time);
  }
  out.validate();
  return out;
}

CheckpointConfig CheckpointCalibration::derive(double interval_min, int host_memory_slots) const {
  if (gpus < 1 || !(storage_write_gbps > 0) || !(pcie_gbps > 0)) {
    throw Error(ErrorCode::kConfig, "calibration " + name + ": gpus and bandwidths must be > 0");
  }
  const double bytes = sim::checkpoint_bytes(model);
  const double write_s = bytes * 8.0 / (storage_write_gbps * 1e9);
  const double copy_s = (bytes / gpus) * 8.0 / (pcie_gbps * 1e9);
  CheckpointConfig cfg;
  cfg.interval = interval_min;
  cfg.host_memory_slots = host_memory_slots;
  cfg.t_block_sync = sync_fixed_s + write_s;
  cfg.t_block_async = async_fixed_s + copy_s;
  cfg.persist_time = write_s;
  cfg.validate();
  return cfg;
}

CheckpointCalibration CheckpointCalibration::from_config(const KvConfig& cfg,
                                                         const std::string& prefix) {
  const std::string p = prefix + ".";
  CheckpointCalibration c;
  c.name = cfg.get_string(p + "name", prefix);
  c.model.psi = cfg.get_double(p + "psi", 0);
  c.model.zero_shard_degree = static_cast<int>(cfg.get_int(p + "zero_shard_degree", 1));
  c.gpus = static_cast<int>(cfg.get_int(p + "gpus", c.gpus));
  c.storage_write_gbps = cfg.get_double(p + "storage_write_gbps", c.storage_write_gbps);
  c.pcie_gbps = cfg.get_double(p + "pcie_gbps", c.pcie_gbps);
  c.sync_fixed_s = cfg.get_double(p + "sync_fixed_s", c.sync_fixed_s);
  c.async_fixed_s = cfg.get_double(p + "async_fixed_s", c.async_fixed_s);
  if (!(c.model.psi > 0)) throw Error(ErrorCode::kConfig, p + "psi must be > 0");
  return c;
}

namespace {

struct Timeline {
  std::vector<CheckpointRecord> records;
  double blocked_seconds = 0;
};

Timeline build_timeline(const CheckpointConfig& cfg, CheckpointMode mode, double horizon) {
  cfg.validate();
  if (!(horizon >= 0)) throw Error(ErrorCode::kInvalid, "horizon must be >= 0");
  Timeline t;
  const auto saves = static_cast<long long>(std::floor(horizon / cfg.interval));
  // Wall-clock seconds; each save happens after `interval` of training
  // since the previous save's stall ended.
  double wall = 0;
  double writer_free = 0;
  std::vector<double> persist_end;  // per save, async only
  for (long long k = 0; k < saves; ++k) {
    wall += cfg.interval * 60.0;
    CheckpointRecord rec;
    rec.taken_at = wall / 60.0;
    double blocked = 0;
    if (mode == CheckpointMode::kSync) {
      blocked = cfg.t_block_sync;
      rec.durable_at = (wall + blocked) / 60.0;
    } else {
      // Slot k reuses the buffer of snapshot k - slots.
      const long long reuse = k - cfg.host_memory_slots;
      const double wait = reuse >= 0 ? std::max(0.0, persist_end[reuse] - wall) : 0.0;
      blocked = wait + cfg.t_block_async;
      const double start = std::max(wall + blocked, writer_free);
      writer_free = start + cfg.persist_time;
      persist_end.push_back(writer_free);
      rec.durable_at = writer_free / 60.0;
    }
    rec.blocked = blocked;
    t.blocked_seconds += blocked;
    wall += blocked;
    t.records.push_back(rec);
  }
  return t;
}

}  // namespace

std::vector<CheckpointRecord> checkpoint_schedule(const CheckpointConfig& cfg, CheckpointMode mode,
                                                  double horizon) {
  return build_timeline(cfg, mode, horizon).records;
}

CheckpointOverhead checkpoint_overhead(const CheckpointConfig& cfg, CheckpointMode mode,
                                       double horizon) {
  const Timeline t = build_timeline(cfg, mode, horizon);
  CheckpointOverhead out;
  out.saves = static_cast<int>(t.records.size());
  out.blocked_seconds = t.blocked_seconds;
  out.blocked_fraction = horizon > 0 ? t.blocked_seconds / (horizon * 60.0) : 0.0;
  return out;
}

double wasted_time(double failure_at, std::span<const double> completed, double restart_time) {
  if (!(failure_at >= 0)) throw Error(ErrorCode::kInvalid, "failure_at must be >= 0");
  double last = 0;
  for (double c : completed) {
    if (c <= failure_at) last = std::max(last, c);
  }
  return failure_at - last + restart_time;
}

double wasted_time(double failure_at, std::span<const CheckpointRecord> records,
                   double restart_time) {
  if (!(failure_at >= 0)) throw Error(ErrorCode::kInvalid, "failure_at must be >= 0");
  double last = 0;
  for (const auto& r : records) {
    if (r.durable_at <= failure_at) last = std::max(last, r.taken_at);
  }
  return failure_at - last + restart_time;
}

}  // namespace acme::ft
