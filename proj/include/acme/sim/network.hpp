#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace acme::sim {

// Seconds to move `bytes` over a link of `link_gbps` shared fairly by
// `concurrent_flows` flows. Throws on a non-positive link or zero flows.
double transfer_time(double bytes, int concurrent_flows, double link_gbps);

// Fluid network with max-min fair rates. Each flow crosses a set of links
// (e.g. a node's storage NIC and the storage backend); rates are recomputed
// by progressive filling whenever the flow set changes.
class FlowNetwork {
 public:
  int add_link(double gbps);

  int start_flow(double bytes, std::vector<int> links);
  void remove_flow(int flow);

  // Advances every active flow to absolute time t at the current rates.
  void advance_to(double t);

  // Earliest (time, flow) completion at current rates.
  std::optional<std::pair<double, int>> next_completion() const;

  double now() const { return now_; }
  double rate_bytes_per_s(int flow) const;
  double remaining_bytes(int flow) const;
  std::size_t active_flows() const { return flows_.size(); }

 private:
  struct Flow {
    double remaining = 0;
    std::vector<int> links;
    double rate = 0;  // bytes/s
  };
  void recompute_rates();

  std::vector<double> link_bytes_per_s_;
  std::map<int, Flow> flows_;
  int next_flow_ = 0;
  double now_ = 0;
};

}  // namespace acme::sim
