#pragma once

#include <functional>
#include <span>
#include <vector>

namespace acme::ft {

using NodeId = int;
// Collective health check on a group; true means pass.
using GroupOracle = std::function<bool(std::span<const NodeId>)>;

struct DetectionResult {
  std::vector<NodeId> faulty;
  std::vector<NodeId> unresolved;  // suspects with no clean partner
  std::vector<std::vector<NodeId>> round1_worlds;
  std::vector<std::vector<NodeId>> round2_worlds;
  int round1_calls = 0;
  int round2_calls = 0;

  bool complete() const { return unresolved.empty(); }
  int oracle_calls() const { return round1_calls + round2_calls; }

  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

// Round 1 pairs consecutive nodes, folding the last three into one world when
// the count is odd; every member of a failing world is a suspect. Round 2
// pairs the i-th suspect with clean node i mod |clean|; with no clean node
// every suspect is unresolved.
DetectionResult two_round_detect(std::span<const NodeId> nodes, const GroupOracle& oracle);

// Oracle that fails any group containing a node from `faulty`.
GroupOracle make_set_oracle(std::vector<NodeId> faulty);

}  // namespace acme::ft
