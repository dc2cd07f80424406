#include "acme/sim/model_memory.hpp"

#include "acme/common/error.hpp"

namespace acme::sim {

ModelMemory model_memory(const ModelShape& shape) {
  if (!(shape.psi >= 0)) throw Error(ErrorCode::kInvalid, "model_memory: psi must be >= 0");
  if (shape.zero_shard_degree < 1) {
    throw Error(ErrorCode::kInvalid, "model_memory: shard degree must be >= 1");
  }
  ModelMemory m;
  m.params_bytes = kParamBytesPerParam * shape.psi;
  m.grads_bytes = kGradBytesPerParam * shape.psi;
  m.optimizer_bytes_per_gpu = kOptimizerBytesPerParam * shape.psi / shape.zero_shard_degree;
  m.total_state_bytes =
      (kParamBytesPerParam + kGradBytesPerParam + kOptimizerBytesPerParam) * shape.psi;
  return m;
}

double checkpoint_bytes(const ModelShape& shape, bool include_gradients) {
  const ModelMemory m = model_memory(shape);
  const double optimizer_total = kOptimizerBytesPerParam * shape.psi;
  return m.params_bytes + optimizer_total + (include_gradients ? m.grads_bytes : 0.0);
}

}  // namespace acme::sim
