#include "dirtybench/error.hpp"

namespace dirtybench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return "parse error";
    case ErrorCode::type: return "type error";
    case ErrorCode::empty_input: return "empty input";
    case ErrorCode::binding: return "binding error";
    case ErrorCode::cycle: return "cycle error";
    case ErrorCode::configuration: return "configuration error";
    case ErrorCode::injection_impossible: return "injection impossible";
    case ErrorCode::imputation_impossible: return "imputation impossible";
    case ErrorCode::undefined_node: return "undefined node";
    case ErrorCode::parameter: return "parameter error";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::singularity: return "singular system";
    case ErrorCode::schema: return "schema error";
    case ErrorCode::io: return "I/O error";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace dirtybench
