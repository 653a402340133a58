#include "ecp/errors.hpp"

namespace ecp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::format: return "format error";
    case ErrorKind::consistency: return "consistency error";
    case ErrorKind::precondition: return "precondition error";
    case ErrorKind::padding: return "padding error";
    case ErrorKind::architecture: return "architecture error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::index: return "index error";
    case ErrorKind::training: return "training error";
    case ErrorKind::coverage_infeasible: return "coverage-infeasible error";
    case ErrorKind::degenerate_calibration: return "degenerate-calibration error";
    case ErrorKind::validation: return "validation failure";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation:
      return 1;
    case ErrorKind::config:
    case ErrorKind::precondition:
    case ErrorKind::architecture:
    case ErrorKind::index:
    case ErrorKind::padding:
    case ErrorKind::coverage_infeasible:
      return 2;
    case ErrorKind::io:
    case ErrorKind::format:
    case ErrorKind::consistency:
      return 3;
    case ErrorKind::numeric:
    case ErrorKind::training:
    case ErrorKind::degenerate_calibration:
      return 4;
  }
  return 70;
}

}  // namespace ecp
