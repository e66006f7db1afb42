#pragma once

#include <optional>
#include <vector>

#include "dxi/quadrature.hpp"
#include "dxi/theta.hpp"

namespace dxi {

// int_0^inf dt/t t^a ln^m(t) (L Psi)(t) e^{-rho ln^2 t}; op == nullopt
// means the bare Gaussian (no theta factor).
struct MellinKernel {
  std::optional<ThetaOperator> op = ThetaOperator::plain();
  int log_power = 0;
  cplx rho = 1.0;
  cplx argument = 0.0;
};

struct XiValue {
  cplx value{0.0};
  double quad_error = 0.0;
  long long evaluations = 0;
  // Set when sum |integrand| exceeds |value| by more than 1e12 (heavy
  // cancellation; typical for small rho and large |Im s|).
  bool precision_warning = false;
};

// Reusable evaluator for a fixed kernel and Gaussian coefficient: node values
// K(e^x) x^m e^{-rho x^2} are computed once per trapezoid level and shared by
// all arguments a.  Not thread-safe; use one instance per thread.
class MellinEvaluator {
 public:
  MellinEvaluator(std::optional<ThetaOperator> op, cplx rho, int log_power = 0,
                  double re_arg_bound = 2.0, const QuadSpec& spec = {});

  XiValue operator()(cplx a) const;
  double radius() const { return radius_; }
  cplx rho() const { return rho_; }

 private:
  void reset(double re_arg_bound) const;
  const std::vector<cplx>& level(size_t idx, double x0, double step, long long count) const;
  cplx node_value(double x) const;

  std::optional<ThetaOperator> op_;
  std::optional<ThetaOperator> refl_;
  cplx rho_;
  int m_;
  QuadSpec spec_;
  mutable double re_bound_ = 0.0;
  mutable double radius_ = 0.0;
  mutable std::vector<std::vector<cplx>> levels_;
};

// (L Psi)(e^x) * e^{exponent}, with the small-t reflection folded into the
// exponent so that neither factor overflows on wide log-axis windows.
// refl must be op->reflected(); op == nullptr means the bare exponential.
cplx kernel_times_exp(const ThetaOperator* op, const ThetaOperator* refl, double x,
                      cplx exponent);

XiValue mellin(const MellinKernel& k, const QuadSpec& spec = {});

// Xi_rho(s) = M[Psi e^{-rho ln^2}](s/2)
XiValue xi(cplx rho, cplx s, const QuadSpec& spec = {});
// d^k/ds^k Xi_rho(s) via the log-moment kernel (ln t / 2)^k.
XiValue xi_derivative(cplx rho, cplx s, int k, const QuadSpec& spec = {});
// sum_{l=0}^{m} Xi_rho(s + l)
XiValue xi_sum_m(cplx rho, cplx s, int m, const QuadSpec& spec = {});
// sum_{l=0}^{m} (-1)^l Xi~_rho(s + l)
XiValue xi_tilde_sum_m(cplx rho, cplx s, int m, const QuadSpec& spec = {});
// Xi~_rho(s) = M[(H_4 Psi) e^{-rho ln^2}](s/2)
XiValue xi_tilde(cplx rho, cplx s, const QuadSpec& spec = {});
// (1 - 2s) Xi_rho(s) + 16 rho d_s Xi_rho(s)
XiValue xi_tilde_via_moments(cplx rho, cplx s, const QuadSpec& spec = {});
// M[(Delta_4 Psi) e^{-rho ln^2}](s/2)
XiValue mellin_delta4(cplx rho, cplx s, const QuadSpec& spec = {});
// M[(L Psi) e^{-rho ln^2}](s/2) for an arbitrary operator.
XiValue mellin_op(const ThetaOperator& op, cplx rho, cplx s, const QuadSpec& spec = {});

// |M[H_a Psi e](s/2) - ((1 - a s/2) Xi + 4 a rho d_s Xi)|
double h_connection_residual(cplx rho, cplx alpha, cplx s, const QuadSpec& spec = {});

// Second-order identity: M[Delta_4 Psi e](s/2) against
// 4(s(s-1) - 8 rho) Xi + 32 rho (1 - 2s) Xi' + (16 rho)^2 Xi''.
struct SecondOrderCheck {
  cplx direct;
  cplx from_moments;
  cplx from_moments_as_printed;  // with 4 s (s - 1 - 8 rho)
};
SecondOrderCheck second_order_identity(cplx rho, cplx s, const QuadSpec& spec = {});

// |d_rho Xi + 4 d_s^2 Xi| with both terms from the same moment.
double heat_residual(cplx rho, cplx s, const QuadSpec& spec = {});
// d_rho Xi = -M[ln^2 t Psi e](s/2)
XiValue xi_drho(cplx rho, cplx s, const QuadSpec& spec = {});

// Telescope right-hand side sqrt(pi/rho)(e^{(s-1)^2/16rho} - e^{(s+m)^2/16rho})/2.
cplx telescope_rhs(cplx rho, cplx s, int m);
// sqrt(pi/rho) e^{a^2/4rho}: the bare Gaussian transform.
cplx gauss_transform(cplx rho, cplx a);

void require_rho(cplx rho, const char* who);

}  // namespace dxi
