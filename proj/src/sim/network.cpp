#include "acme/sim/network.hpp"

#include <algorithm>
#include <limits>

#include "acme/common/error.hpp"

namespace acme::sim {

double transfer_time(double bytes, int concurrent_flows, double link_gbps) {
  if (!(link_gbps > 0)) throw Error(ErrorCode::kInvalid, "transfer_time: link must be > 0 Gb/s");
  if (concurrent_flows < 1) throw Error(ErrorCode::kInvalid, "transfer_time: flows must be >= 1");
  if (bytes < 0) throw Error(ErrorCode::kInvalid, "transfer_time: bytes must be >= 0");
  const double per_flow_bits_per_s = link_gbps * 1e9 / concurrent_flows;
  return bytes * 8.0 / per_flow_bits_per_s;
}

int FlowNetwork::add_link(double gbps) {
  if (!(gbps > 0)) throw Error(ErrorCode::kInvalid, "FlowNetwork: link must be > 0 Gb/s");
  link_bytes_per_s_.push_back(gbps * 1e9 / 8.0);
  return static_cast<int>(link_bytes_per_s_.size()) - 1;
}

int FlowNetwork::start_flow(double bytes, std::vector<int> links) {
  if (links.empty()) throw Error(ErrorCode::kInvalid, "FlowNetwork: flow needs at least one link");
  for (int l : links) {
    if (l < 0 || l >= static_cast<int>(link_bytes_per_s_.size())) {
      throw Error(ErrorCode::kInvalid, "FlowNetwork: unknown link");
    }
  }
  const int id = next_flow_++;
  flows_[id] = Flow{std::max(0.0, bytes), std::move(links), 0.0};
  recompute_rates();
  return id;
}

void FlowNetwork::remove_flow(int flow) {
  flows_.erase(flow);
  recompute_rates();
}

void FlowNetwork::advance_to(double t) {
  const double dt = t - now_;
  if (dt > 0) {
    for (auto& [id, f] : flows_) f.remaining = std::max(0.0, f.remaining - f.rate * dt);
  }
  now_ = std::max(now_, t);
}

std::optional<std::pair<double, int>> FlowNetwork::next_completion() const {
  std::optional<std::pair<double, int>> best;
  for (const auto& [id, f] : flows_) {
    const double t = f.remaining <= 0 ? now_ : now_ + f.remaining / f.rate;
    if (!best || t < best->first) best = std::make_pair(t, id);
  }
  return best;
}

double FlowNetwork::rate_bytes_per_s(int flow) const { return flows_.at(flow).rate; }
double FlowNetwork::remaining_bytes(int flow) const { return flows_.at(flow).remaining; }

void FlowNetwork::recompute_rates() {
  std::vector<double> capacity = link_bytes_per_s_;
  std::vector<int> unfrozen_on_link(capacity.size(), 0);
  std::map<int, bool> frozen;
  for (auto& [id, f] : flows_) {
    frozen[id] = false;
    for (int l : f.links) ++unfrozen_on_link[l];
  }
  std::size_t remaining = flows_.size();
  while (remaining > 0) {
    double share = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < capacity.size(); ++l) {
      if (unfrozen_on_link[l] > 0) share = std::min(share, capacity[l] / unfrozen_on_link[l]);
    }
    // Freeze every flow that crosses a bottleneck link at this share.
    std::vector<int> to_freeze;
    for (auto& [id, f] : flows_) {
      if (frozen[id]) continue;
      for (int l : f.links) {
        if (capacity[l] / unfrozen_on_link[l] <= share) {
          to_freeze.push_back(id);
          break;
        }
      }
    }
    for (int id : to_freeze) {
      Flow& f = flows_[id];
      f.rate = share;
      frozen[id] = true;
      --remaining;
      for (int l : f.links) {
        capacity[l] = std::max(0.0, capacity[l] - share);
        --unfrozen_on_link[l];
      }
    }
  }
}

}  // namespace acme::sim
