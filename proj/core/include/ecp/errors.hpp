#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecp {

enum class ErrorKind {
  config,
  io,
  format,
  consistency,
  precondition,
  padding,
  architecture,
  numeric,
  index,
  training,
  coverage_infeasible,
  degenerate_calibration,
  validation,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for a failure of the given kind (0 is reserved for success).
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace ecp
