#include "acme/sim/cluster.hpp"

#include "acme/common/error.hpp"
#include "acme/common/text.hpp"

namespace acme::sim {

ClusterSpec ClusterSpec::seren() {
  ClusterSpec c;
  c.name = "Seren";
  c.node_count = 286;
  c.node.host_memory_gb = 1024;
  c.node.compute_nic_gbps = {200.0};
  return c;
}

ClusterSpec ClusterSpec::kalos() {
  ClusterSpec c;
  c.name = "Kalos";
  c.node_count = 302;
  c.node.host_memory_gb = 2048;
  // Four HCAs for application traffic plus one dedicated to storage.
  c.node.compute_nic_gbps = {200.0, 200.0, 200.0, 200.0, 200.0};
  return c;
}

ClusterSpec ClusterSpec::from_config(const KvConfig& cfg) {
  const std::string preset = text::lower(cfg.get_string("cluster.preset", "seren"));
  ClusterSpec c;
  if (preset == "seren") {
    c = seren();
  } else if (preset == "kalos") {
    c = kalos();
  } else {
    throw Error(ErrorCode::kConfig, "cluster.preset: unknown preset '" + preset + "'");
  }
  c.name = cfg.get_string("cluster.name", c.name);
  c.node_count = static_cast<int>(cfg.get_int("cluster.node_count", c.node_count));
  c.node.gpus_per_node = static_cast<int>(cfg.get_int("cluster.gpus_per_node", c.node.gpus_per_node));
  c.node.cpus_per_node = static_cast<int>(cfg.get_int("cluster.cpus_per_node", c.node.cpus_per_node));
  c.node.host_memory_gb =
      static_cast<int>(cfg.get_int("cluster.host_memory_gb", c.node.host_memory_gb));
  c.node.compute_nic_gbps = cfg.get_double_list("cluster.compute_nic_gbps", c.node.compute_nic_gbps);
  c.node.storage_nic_gbps = cfg.get_double("cluster.storage_nic_gbps", c.node.storage_nic_gbps);
  c.node.pcie_gbps = cfg.get_double("cluster.pcie_gbps", c.node.pcie_gbps);
  c.remote_storage_aggregate_gbps =
      cfg.get_double("cluster.remote_storage_aggregate_gbps", c.remote_storage_aggregate_gbps);
  c.validate();
  return c;
}

void ClusterSpec::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0)) throw Error(ErrorCode::kConfig, std::string("cluster: ") + what + " must be > 0");
  };
  positive(node_count, "node_count");
  positive(node.gpus_per_node, "gpus_per_node");
  positive(node.cpus_per_node, "cpus_per_node");
  positive(node.host_memory_gb, "host_memory_gb");
  if (node.compute_nic_gbps.empty()) throw Error(ErrorCode::kConfig, "cluster: no compute NICs");
  for (double nic : node.compute_nic_gbps) positive(nic, "compute_nic_gbps");
  positive(node.storage_nic_gbps, "storage_nic_gbps");
  positive(node.pcie_gbps, "pcie_gbps");
  positive(remote_storage_aggregate_gbps, "remote_storage_aggregate_gbps");
}

int Placement::total_gpus() const {
  int total = 0;
  for (const auto& [node, gpus] : parts) total += gpus;
  return total;
}

ClusterState::ClusterState(int node_count, int gpus_per_node)
    : gpus_per_node_(gpus_per_node), free_(static_cast<std::size_t>(node_count), gpus_per_node) {
  if (node_count <= 0 || gpus_per_node <= 0) {
    throw Error(ErrorCode::kInvalid, "cluster state needs positive node and GPU counts");
  }
}

int ClusterState::free_gpus() const {
  int total = 0;
  for (int f : free_) total += f;
  return total;
}

std::optional<Placement> ClusterState::find(int gpu_num, PlacementPolicy policy,
                                            const std::vector<bool>* eligible) const {
  if (gpu_num < 1) throw Error(ErrorCode::kInvalid, "allocate: gpu_num must be >= 1");
  if (gpu_num > total_gpus()) {
    throw Error(ErrorCode::kInfeasible, "job asks for " + std::to_string(gpu_num) +
                                            " GPUs, cluster has " + std::to_string(total_gpus()));
  }
  auto usable = [&](int n) { return eligible == nullptr || (*eligible)[n]; };
  Placement p;
  if (gpu_num >= gpus_per_node_) {
    const int nodes_needed = (gpu_num + gpus_per_node_ - 1) / gpus_per_node_;
    int remaining = gpu_num;
    for (int n = 0; n < node_count() && static_cast<int>(p.parts.size()) < nodes_needed; ++n) {
      if (!usable(n) || free_[n] != gpus_per_node_) continue;
      const int take = std::min(remaining, gpus_per_node_);
      p.parts.emplace_back(n, take);
      remaining -= take;
    }
    if (remaining > 0) return std::nullopt;
    return p;
  }
  int chosen = -1;
  for (int n = 0; n < node_count(); ++n) {
    if (!usable(n) || free_[n] < gpu_num) continue;
    if (policy == PlacementPolicy::kPackWholeNodes) {
      chosen = n;
      break;
    }
    if (chosen < 0 || free_[n] < free_[chosen]) chosen = n;
  }
  if (chosen < 0) return std::nullopt;
  p.parts.emplace_back(chosen, gpu_num);
  return p;
}

std::optional<Placement> ClusterState::allocate(int gpu_num, PlacementPolicy policy,
                                                const std::vector<bool>* eligible) {
  auto p = find(gpu_num, policy, eligible);
  if (p) claim(*p);
  return p;
}

void ClusterState::claim(const Placement& placement) {
  for (const auto& [node, gpus] : placement.parts) {
    if (free_[node] < gpus) {
      throw Error(ErrorCode::kInvalid, "claim exceeds free GPUs on node " + std::to_string(node));
    }
  }
  for (const auto& [node, gpus] : placement.parts) free_[node] -= gpus;
}

void ClusterState::release(const Placement& placement) {
  for (const auto& [node, gpus] : placement.parts) {
    if (free_[node] + gpus > gpus_per_node_) {
      throw Error(ErrorCode::kInvalid, "release exceeds node capacity on node " + std::to_string(node));
    }
    free_[node] += gpus;
  }
}

}  // namespace acme::sim
