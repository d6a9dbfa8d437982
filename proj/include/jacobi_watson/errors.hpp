#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jw {

enum class ErrorKind {
  domain,          // argument outside the operation's domain
  degenerate,      // zero-mass interval or similar degenerate input
  region,          // outside a series' convergence region
  convergence,     // iteration cap reached before tolerance
  regime,          // parameters outside the validity regime of a formula
  singular,        // evaluation at a singular point
  divergence,      // integral or sequence does not converge
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

}  // namespace jw
