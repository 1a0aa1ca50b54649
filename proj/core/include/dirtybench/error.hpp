#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dirtybench {

enum class ErrorCode {
  parse,
  type,
  empty_input,
  binding,
  cycle,
  configuration,
  injection_impossible,
  imputation_impossible,
  undefined_node,
  parameter,
  unsupported,
  divergence,
  singularity,
  schema,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// The single exception type thrown by the library. The code tells callers
/// (the CLI in particular) which failure class occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dirtybench
