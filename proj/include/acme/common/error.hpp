#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acme {

// Machine-readable error classes. The CLI maps these onto exit codes.
enum class ErrorCode {
  kConfig,      // malformed or incomplete run configuration
  kData,        // input data missing or unusable
  kIo,          // output could not be written
  kInvalid,     // precondition violated by a caller
  kCausality,   // event scheduled in the simulated past
  kInfeasible,  // request can never be satisfied (e.g. larger than the cluster)
  kAgent,       // agent client failed to produce a response
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace acme
