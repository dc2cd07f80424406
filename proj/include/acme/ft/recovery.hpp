#pragma once

#include <string_view>
#include <vector>

#include "acme/diag/diagnosis_result.hpp"
#include "acme/ft/detection.hpp"

namespace acme::ft {

enum class Anomaly { kLossSpike, kHang };

struct RecoveryAction {
  enum class Kind {
    kRestartFromLastCheckpoint,
    kRollbackEarlierAndSkipBatches,
    kCordonNodesAndRestart,
    kNotifyUserNoRestart,
  };

  Kind kind = Kind::kRestartFromLastCheckpoint;
  int checkpoint_id = -1;  // -1: restart from scratch
  long long skip_count = 0;
  std::vector<NodeId> nodes;
  std::vector<NodeId> unresolved;

  friend bool operator==(const RecoveryAction&, const RecoveryAction&) = default;
};

std::string_view to_string(RecoveryAction::Kind k);

struct RecoveryContext {
  std::vector<NodeId> nodes;         // nodes of the job
  GroupOracle oracle;                // for infrastructure diagnoses
  std::vector<long long> checkpoint_steps;  // ascending; index is checkpoint id
  int rollback_depth = 1;
};

RecoveryAction recovery_action(const diag::DiagnosisResult& diagnosis, const RecoveryContext& ctx);
RecoveryAction recovery_action(Anomaly anomaly, const RecoveryContext& ctx);

}  // namespace acme::ft
