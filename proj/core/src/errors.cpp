#include "normprop/errors.hpp"

namespace normprop {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::format: return "format";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::no_root: return "no_root";
    case ErrorKind::state: return "state";
    case ErrorKind::wrong_kernel: return "wrong_kernel";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace normprop
