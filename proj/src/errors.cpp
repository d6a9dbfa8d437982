#include "jacobi_watson/errors.hpp"

namespace jw {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::region: return "region";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::regime: return "regime";
    case ErrorKind::singular: return "singular";
    case ErrorKind::divergence: return "divergence";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + what);
}

}  // namespace jw
