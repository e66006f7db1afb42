#pragma once

#include <array>
#include <functional>

#include "dxi/xi_core.hpp"

namespace dxi {

// Transport weight w_a(s) = e^{(-s^2 + 4s/a)/16 rho}.
cplx transport_weight(cplx rho, cplx alpha, cplx s);

// Residuals of the first-order transport equation between z and s:
//  direct:    w Xi(s) = w Xi(z) + (1/4 a rho) int_z^s w M[H_a Psi e](t/2) dt
//  reflected: the same through 1 - t with H_b, b = a/(a/2 - 1), and the
//             exponential boundary terms.  a = 2 has no reflected form.
struct Fde1Residual {
  double direct = 0.0;
  double reflected = 0.0;
};
Fde1Residual fde1_residual(cplx rho, cplx alpha, cplx z, cplx s, const QuadSpec& spec = {});
double fde1_direct_residual(cplx rho, cplx alpha, cplx z, cplx s, const QuadSpec& spec = {});

// int_z^{z2} w_a(t) M[H_a Psi e](t/2) dt (vanishes when w Xi agrees at both ends).
XiValue transport_integral(cplx rho, cplx alpha, cplx z, cplx z2, const QuadSpec& spec = {});

// |((4 a rho)^2 d_s^2 - id)(w Xi) - w M[Delta_a Psi e](s/2)|, d_s^2 expanded
// by the product rule onto log-moment kernels.
double second_order_residual(cplx rho, cplx alpha, cplx s, const QuadSpec& spec = {});
// Same with the operator sign as printed, (id - (4 a rho)^2 d_s^2).
double second_order_residual_as_printed(cplx rho, cplx alpha, cplx s, const QuadSpec& spec = {});
// d_s^2 (w Xi)(s) by the analytic product rule.
cplx weighted_xi_second_derivative(cplx rho, cplx alpha, cplx s, const QuadSpec& spec = {});

// Variation of parameters with the fundamental system
// sinh((beta1 - s)/4 a rho), cosh((beta2 - s)/4 a rho), matched at z.
struct VopCoefficients {
  cplx A{0.0};
  cplx B{0.0};
  std::array<cplx, 2> beta{};
  cplx alpha{4.0};
  cplx z{0.5};
  cplx rho{1.0};
};
VopCoefficients vop_coefficients(cplx rho, cplx alpha, std::array<cplx, 2> beta, cplx z,
                                 const QuadSpec& spec = {});
// A sinh((b1 - s)/c) + B cosh((b2 - s)/c) + (1/c) int_z^s sinh((s-t)/c) w M[Delta_a Psi e](t/2) dt,
// which reproduces w_a(s) Xi_rho(s).
XiValue vop_solution(const VopCoefficients& v, cplx s, const QuadSpec& spec = {});

// chi(phi, a, s, z) = int_z^s e^{(-t^2 + phi t)/16 rho} M[Delta_a Psi e](t/2) dt
XiValue chi(cplx rho, cplx phi, cplx alpha, cplx s, cplx z, const QuadSpec& spec = {});
// |LHS - RHS| of the s -> 1 - s transformation law for chi.
double chi_transform_residual(cplx rho, cplx phi, cplx alpha, cplx s, cplx z,
                              const QuadSpec& spec = {});
// chi(1,a,s,z) + chi(1,a,1-s,1-z) = 16 rho a(4-a)/4 [f(1-s) - f(1-z)],
// f(x) = e^{(-x^2+x)/16rho} Xi(x) + sqrt(pi/rho) e^{x/16rho}/2.
double chi_phi1_residual(cplx rho, cplx alpha, cplx s, cplx z, const QuadSpec& spec = {});
// Same relation with the bracket as printed, e^{..} Xi(1-x) - sqrt(pi/rho) e^{x/16rho}/2.
double chi_phi1_residual_as_printed(cplx rho, cplx alpha, cplx s, cplx z,
                                    const QuadSpec& spec = {});

struct DecompositionResult {
  cplx sinh_coeff{0.0};
  cplx cosh_coeff{0.0};
  cplx integral_part{0.0};
  cplx total{0.0};
  long long evaluations = 0;
};

// e^{(-s^2+s)/16 rho} Xi_rho(s), the function both decompositions reproduce.
XiValue canonical_target(cplx rho, cplx s, const QuadSpec& spec = {});
XiValue tilde_target(cplx rho, cplx s, const QuadSpec& spec = {});

// sinh_coeff = e^{1/32rho} sqrt(pi/rho)/2, cosh_coeff = e^{1/64rho} Xi_rho(1/2),
// integral_part = (1/16rho) int_{1/2}^s sinh((s-t)/16rho) e^{(-t^2+t)/16rho} M[Delta_4 Psi e](t/2) dt.
DecompositionResult canonical_decomposition(cplx rho, cplx s, const QuadSpec& spec = {});
// The same integral with the kernel written as 2t^2 Psi'' + 3t Psi' (prefactor 1/2rho).
cplx canonical_integral_polya(cplx rho, cplx s, const QuadSpec& spec = {});
double canonical_sinh_coeff(cplx rho);
double canonical_sinh_coeff_as_printed(cplx rho);

// a+-(s) = (1/32rho) int_{1/2}^s (e^{(1/2-t)/16rho} +- e^{(t-1/2)/16rho}) e^{(-t^2+t)/16rho} M[Delta_4 Psi e](t/2) dt
struct APm {
  cplx plus{0.0};
  cplx minus{0.0};
};
APm a_pm(cplx rho, cplx s, const QuadSpec& spec = {});
// [sc - a+] sinh + [cc + a-] cosh
cplx a_pm_reconstruction(cplx rho, cplx s, const QuadSpec& spec = {});

// e^{(-s^2+s)/16rho} Xi~_rho(s) = C sinh + (-sc) cosh + (1/16rho) int cosh((s-t)/16rho)(...),
// with C = -e^{1/64rho} Xi_rho(1/2) (reported as sinh_coeff).
DecompositionResult tilde_decomposition(cplx rho, cplx s, const QuadSpec& spec = {});

// P^0 = cosh((1/2-s)/16rho), P^n(s) = int_{1/2}^s sinh((s-t)/16rho) P^{n-1}(t) dt, n <= 3.
cplx iterated_P(cplx rho, int n, cplx s, const QuadSpec& spec = {});
// I^n: n nested sinh kernels ending in e^{(-t^2+t)/16rho} M[Delta_4^n Psi e](t/2), 1 <= n <= 3.
XiValue iterated_I(cplx rho, int n, cplx s, const QuadSpec& spec = {});
// P^1 in closed form ((1/2 - s)/2) sinh((1/2-s)/16rho) and as printed.
cplx p1_closed(cplx rho, cplx s);
cplx p1_as_printed(cplx rho, cplx s);
// |e^{..}Xi(s) - [sc sinh + e^{1/64rho} sum_{i<n} M[Delta_4^i Psi e](1/4) P^i/(16rho)^i + I^n/(16rho)^n]|
double iterated_expansion_residual(cplx rho, int n, cplx s, const QuadSpec& spec = {});

// M[Delta_a Psi e](s/2) - M[Delta_a Psi e]((1-s)/2)
//   - a(a-4)/4 (M[H_4 Psi e]((1-s)/2) + sqrt(pi/rho) e^{(s-1)^2/16rho}/2)
double msym_residual(cplx rho, cplx alpha, cplx s, const QuadSpec& spec = {});
// Xi(s) - Xi(1-s) rebuilt from the canonical decomposition, against the telescope form.
double newb_closure_residual(cplx rho, cplx s, const QuadSpec& spec = {});

// Two-step first-order expansion with boundary terms (valid for any z1, z2):
//  w Xi(s) = w Xi(z1) + (s - z1) w M[H_a](z2)/c + c^{-2} int_{z1}^s int_{z2}^{t1} w M[H_a^2 Psi e](t2/2)
// with c = 4 a rho.  Returns |LHS - RHS|.
double iterated_first_order_residual(cplx rho, cplx alpha, cplx z1, cplx z2, cplx s,
                                     const QuadSpec& spec = {});
// The double integral alone (with z1, z2 roots the boundary terms drop out).
XiValue iterated_first_order_integral(cplx rho, cplx alpha, cplx z1, cplx z2, cplx s,
                                      const QuadSpec& spec = {});

// Secant iteration on an analytic f; empty if it does not settle within max_iter.
std::optional<cplx> secant_root(const std::function<cplx(cplx)>& f, cplx z0, cplx z1,
                                double tol = 1e-12, int max_iter = 60);

}  // namespace dxi
