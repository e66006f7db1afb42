#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dxi {

using cplx = std::complex<double>;

enum class ErrorCode {
  Domain = 1,
  UnsupportedOrder,
  NonConvergence,
  Singular,
  Degenerate,
  Parse,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when refinement runs out of budget; carries the last estimate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& msg, cplx best, double err)
      : Error(ErrorCode::NonConvergence, msg), best_(best), err_(err) {}
  cplx best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return err_; }

 private:
  cplx best_;
  double err_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) {
  throw Error(c, msg);
}

}  // namespace dxi
