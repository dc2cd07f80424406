#include "acme/ft/recovery.hpp"

namespace acme::ft {

std::string_view to_string(RecoveryAction::Kind k) {
  switch (k) {
    case RecoveryAction::Kind::kRestartFromLastCheckpoint: return "RestartFromLastCheckpoint";
    case RecoveryAction::Kind::kRollbackEarlierAndSkipBatches: return "RollbackEarlierAndSkipBatches";
    case RecoveryAction::Kind::kCordonNodesAndRestart: return "CordonNodesAndRestart";
    case RecoveryAction::Kind::kNotifyUserNoRestart: return "NotifyUserNoRestart";
  }
  return "Unknown";
}

namespace {

int last_checkpoint(const RecoveryContext& ctx) {
  return static_cast<int>(ctx.checkpoint_steps.size()) - 1;
}

RecoveryAction restart_last(const RecoveryContext& ctx) {
  RecoveryAction a;
  a.kind = RecoveryAction::Kind::kRestartFromLastCheckpoint;
  a.checkpoint_id = last_checkpoint(ctx);
  return a;
}

}  // namespace

RecoveryAction recovery_action(Anomaly anomaly, const RecoveryContext& ctx) {
  if (anomaly == Anomaly::kHang) return restart_last(ctx);

  RecoveryAction a;
  a.kind = RecoveryAction::Kind::kRollbackEarlierAndSkipBatches;
  const int last = last_checkpoint(ctx);
  if (last < 0) return a;  // nothing saved yet: restart from scratch
  const int depth = ctx.rollback_depth < 0 ? 0 : ctx.rollback_depth;
  a.checkpoint_id = last - depth < 0 ? 0 : last - depth;
  a.skip_count = ctx.checkpoint_steps[last] - ctx.checkpoint_steps[a.checkpoint_id];
  if (a.skip_count < 0) a.skip_count = 0;
  return a;
}

RecoveryAction recovery_action(const diag::DiagnosisResult& diagnosis, const RecoveryContext& ctx) {
  if (diagnosis.category == diag::Category::kInfrastructure) {
    DetectionResult found;
    if (ctx.oracle) found = two_round_detect(ctx.nodes, ctx.oracle);
    if (found.faulty.empty() && found.unresolved.empty()) return restart_last(ctx);
    RecoveryAction a;
    a.kind = RecoveryAction::Kind::kCordonNodesAndRestart;
    a.checkpoint_id = last_checkpoint(ctx);
    a.nodes = found.faulty;
    a.unresolved = found.unresolved;
    return a;
  }
  if (diagnosis.origin == diag::Origin::kUser || diagnosis.recoverable == diag::Recoverable::kNo) {
    RecoveryAction a;
    a.kind = RecoveryAction::Kind::kNotifyUserNoRestart;
    a.checkpoint_id = last_checkpoint(ctx);
    return a;
  }
  return restart_last(ctx);
}

}  // namespace acme::ft
