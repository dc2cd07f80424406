#pragma once

#include <cstdint>

namespace acme::sim {

// Mixed-precision Adam training state for a model with `psi` parameters:
// fp16 parameters and gradients (2 bytes each) and fp32 optimizer state
// (master weights, momentum, variance: 12 bytes), the latter sharded over
// `zero_shard_degree` workers.
struct ModelShape {
  double psi = 0;
  int zero_shard_degree = 1;
};

inline constexpr double kParamBytesPerParam = 2.0;
inline constexpr double kGradBytesPerParam = 2.0;
inline constexpr double kOptimizerBytesPerParam = 12.0;

struct ModelMemory {
  double params_bytes = 0;
  double grads_bytes = 0;
  double optimizer_bytes_per_gpu = 0;
  double total_state_bytes = 0;  // unsharded total, 16 x psi
};

// Throws ErrorCode::kInvalid for psi < 0 or a shard degree < 1.
ModelMemory model_memory(const ModelShape& shape);

// Persisted checkpoint payload: parameters plus optimizer state (14 x psi).
// Gradients are not needed to resume and are only included on request.
double checkpoint_bytes(const ModelShape& shape, bool include_gradients = false);

}  // namespace acme::sim
