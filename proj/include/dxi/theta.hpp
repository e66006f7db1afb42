#pragma once

#include <string>
#include <vector>

#include "dxi/error.hpp"

namespace dxi {

// A differential operator acting on Psi, stored as a polynomial in the
// Euler operator theta = t d/dt.  Every operator the library needs (H_a,
// Delta_a, their products and powers) is of this form, which makes the
// t -> 1/t reflection a simple substitution theta -> -theta - 1/2.
class ThetaOperator {
 public:
  enum class Kind { Plain, H, Delta4, Delta4H4, Delta4Power, DeltaAlpha, Custom };

  static ThetaOperator plain();
  static ThetaOperator h(cplx alpha);
  static ThetaOperator delta4();
  static ThetaOperator delta4_h4();
  static ThetaOperator delta4_power(int n);  // n <= 3
  static ThetaOperator delta_alpha(cplx alpha);  // H_a^2 - id
  static ThetaOperator h_power(cplx alpha, int n);
  static ThetaOperator from_theta_poly(std::vector<cplx> coeffs);

  Kind kind() const { return kind_; }
  cplx alpha() const { return alpha_; }
  int power() const { return power_; }
  std::string name() const;

  // Coefficients c_k of sum_k c_k theta^k.
  const std::vector<cplx>& theta_coeffs() const { return theta_; }
  int degree() const { return static_cast<int>(theta_.size()) - 1; }

  // theta^k e^{-u} = p_k(u) e^{-u} with u = pi n^2 t; this is the combined
  // polynomial sum_k c_k p_k(u), i.e. the per-term multiplier of the series.
  const std::vector<cplx>& term_poly() const { return term_; }

  // The operator L~(theta) = L(-theta - 1/2).
  ThetaOperator reflected() const;
  cplx eval(cplx theta) const;

  // Composition (operators in theta commute).
  ThetaOperator operator*(const ThetaOperator& o) const;

 private:
  ThetaOperator(Kind k, std::vector<cplx> coeffs, cplx alpha = 0.0, int power = 0);
  Kind kind_;
  cplx alpha_;
  int power_;
  std::vector<cplx> theta_;
  std::vector<cplx> term_;
};

struct ThetaTruncation {
  double eps = 1e-18;

  // Smallest N with pi^k N^{2k} e^{-pi N^2 t} / (1 - e^{-pi(2N+1)t}) <= eps
  // (and past the maximum of the summand).
  int terms(double t, int k) const;
  // Same, for a term multiplier bounded by scale * max(1,u)^k.
  int terms_weighted(double t, int k, double scale) const;
};

constexpr int kMaxPsiDerivative = 3;
constexpr int kMaxThetaDegree = 6;

// d^k/dt^k Psi(t).
double psi(double t, int deriv_order = 0, const ThetaTruncation& tr = {});

// (L Psi)(t); reflected evaluation for t < 0.2.
cplx apply_theta_op(const ThetaOperator& op, double t, const ThetaTruncation& tr = {});

// (L Psi)(t) by the direct series only (no reflection).
cplx apply_theta_op_series(const ThetaOperator& op, double t, const ThetaTruncation& tr = {});

enum class ReflectionKind { Psi, H4, Delta4, DeltaAlpha };

// |LHS - RHS| of the t -> 1/t identity for the chosen kind, with both sides
// summed directly.
double functional_residual(ReflectionKind kind, double t, cplx alpha = 0.0,
                           const ThetaTruncation& tr = {});

}  // namespace dxi
