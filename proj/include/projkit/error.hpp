#pragma once

#include <stdexcept>
#include <string>

namespace projkit {

enum class Errc {
  dimension_mismatch,
  unsupported,
  degenerate_body,
  symmetry_violation,
  not_convex,
  infeasible,
  non_convergence,
  precondition,
  parse,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::unsupported: return "unsupported";
    case Errc::degenerate_body: return "degenerate body";
    case Errc::symmetry_violation: return "symmetry violation";
    case Errc::not_convex: return "not convex";
    case Errc::infeasible: return "infeasible";
    case Errc::non_convergence: return "non-convergence";
    case Errc::precondition: return "precondition violated";
    case Errc::parse: return "parse error";
  }
  return "unknown";
}

/// Exception carrying a machine-readable category next to the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace projkit
