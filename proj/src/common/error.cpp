#include "acme/common/error.hpp"

namespace acme {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kData: return "data_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kInvalid: return "invalid_argument";
    case ErrorCode::kCausality: return "causality_violation";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kAgent: return "agent_failure";
  }
  return "unknown";
}

}  // namespace acme
