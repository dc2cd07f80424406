#include "acme/ft/detection.hpp"

#include <algorithm>

namespace acme::ft {

DetectionResult two_round_detect(std::span<const NodeId> nodes, const GroupOracle& oracle) {
  DetectionResult r;
  const std::size_t n = nodes.size();
  if (n == 0) return r;

  if (n == 1) {
    r.round1_worlds.push_back({nodes[0]});
  } else {
    const std::size_t pairs_end = (n % 2 == 0) ? n : n - 3;
    for (std::size_t i = 0; i < pairs_end; i += 2) r.round1_worlds.push_back({nodes[i], nodes[i + 1]});
    if (n % 2 == 1) r.round1_worlds.push_back({nodes[n - 3], nodes[n - 2], nodes[n - 1]});
  }

  std::vector<NodeId> suspects;
  std::vector<NodeId> clean;
  for (const auto& world : r.round1_worlds) {
    ++r.round1_calls;
    auto& dest = oracle(world) ? clean : suspects;
    dest.insert(dest.end(), world.begin(), world.end());
  }
  // A lone node tested by itself needs no second round.
  if (n == 1) {
    r.faulty = suspects;
    return r;
  }

  // Clean nodes are reused in turn when suspects outnumber them.
  for (std::size_t i = 0; i < suspects.size(); ++i) {
    if (clean.empty()) {
      r.unresolved.push_back(suspects[i]);
      continue;
    }
    std::vector<NodeId> world = {suspects[i], clean[i % clean.size()]};
    ++r.round2_calls;
    if (!oracle(world)) r.faulty.push_back(suspects[i]);
    r.round2_worlds.push_back(std::move(world));
  }
  std::sort(r.faulty.begin(), r.faulty.end());
  std::sort(r.unresolved.begin(), r.unresolved.end());
  return r;
}

GroupOracle make_set_oracle(std::vector<NodeId> faulty) {
  std::sort(faulty.begin(), faulty.end());
  return [faulty = std::move(faulty)](std::span<const NodeId> group) {
    for (NodeId id : group) {
      if (std::binary_search(faulty.begin(), faulty.end(), id)) return false;
    }
    return true;
  };
}

}  // namespace acme::ft
