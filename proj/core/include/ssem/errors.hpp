#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ssem {

/// Error category attached to every ssem::Error so callers can branch on
/// the failure kind without parsing messages.
enum class errc {
  invalid_argument,
  invalid_symbol,
  unsupported_order,
  unsupported_dimension,
  out_of_domain,
  out_of_range,
  dimension_mismatch,
  degenerate_domain,
  too_coarse,
  too_large_for_dense,
  preconditioner_failure,
  non_convergence,
  breakdown,
  invalid_data,
  insufficient_data,
  degenerate_mask,
  io_failure,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

/// Iterative-solver failure; keeps the residual history for diagnostics.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(errc::non_convergence, what), residual_history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept {
    return residual_history_;
  }

private:
  std::vector<double> residual_history_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace ssem
