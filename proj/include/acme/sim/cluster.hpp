#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acme/common/kv_config.hpp"

namespace acme::sim {

struct NodeSpec {
  int gpus_per_node = 8;
  int cpus_per_node = 128;
  int host_memory_gb = 1024;
  std::vector<double> compute_nic_gbps = {200.0};
  double storage_nic_gbps = 25.0;
  // Host shared memory -> GPU path used by local model loads. No published
  // figure; the default only has to dwarf the storage NIC.
  double pcie_gbps = 128.0;
};

struct ClusterSpec {
  std::string name = "Seren";
  int node_count = 286;
  NodeSpec node;
  double remote_storage_aggregate_gbps = 3200.0;

  static ClusterSpec seren();
  static ClusterSpec kalos();
  // `cluster.preset = seren|kalos` then per-field overrides under `cluster.*`.
  static ClusterSpec from_config(const KvConfig& cfg);

  int total_gpus() const { return node_count * node.gpus_per_node; }
  // Throws ErrorCode::kConfig when a capacity is not positive.
  void validate() const;
};

enum class PlacementPolicy { kPackWholeNodes, kBestFit };

struct Placement {
  std::vector<std::pair<int, int>> parts;  // (node, gpus)
  int total_gpus() const;
  friend bool operator==(const Placement&, const Placement&) = default;
};

// Free-GPU bookkeeping with gang semantics: a request is granted in full or not
// at all.
class ClusterState {
 public:
  ClusterState(int node_count, int gpus_per_node);
  explicit ClusterState(const ClusterSpec& spec)
      : ClusterState(spec.node_count, spec.node.gpus_per_node) {}

  int node_count() const { return static_cast<int>(free_.size()); }
  int gpus_per_node() const { return gpus_per_node_; }
  int total_gpus() const { return node_count() * gpus_per_node_; }
  int free_gpus(int node) const { return free_[node]; }
  int free_gpus() const;
  const std::vector<int>& free_vector() const { return free_; }

  // Jobs asking for >= one node's worth of GPUs get whole free nodes; smaller
  // jobs go to the lowest-index node with room (PackWholeNodes) or to the node
  // with the least sufficient free capacity (BestFit). `eligible`, when given,
  // restricts the candidate nodes. Returns nullopt when the job must queue;
  // throws ErrorCode::kInfeasible when it exceeds the whole cluster.
  std::optional<Placement> allocate(int gpu_num, PlacementPolicy policy,
                                    const std::vector<bool>* eligible = nullptr);
  // Read-only variant of allocate().
  std::optional<Placement> find(int gpu_num, PlacementPolicy policy,
                                const std::vector<bool>* eligible = nullptr) const;
  // Marks a placement returned by find() as allocated.
  void claim(const Placement& placement);
  void release(const Placement& placement);

 private:
  int gpus_per_node_;
  std::vector<int> free_;
};

}  // namespace acme::sim
