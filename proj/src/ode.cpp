#include "dxi/ode.hpp"

#include <cmath>
#include <numbers>

namespace dxi {

namespace {

constexpr double kPi = std::numbers::pi;

// e^{(-t^2 + phi t)/16 rho} M[(L Psi) e](t/2) with the node values cached.
class WeightedKernel {
 public:
  WeightedKernel(const ThetaOperator& op, cplx rho, cplx phi, double re_bound,
                 const QuadSpec& spec)
      : ev_(op, rho, 0, re_bound / 2.0 + 0.5, spec), rho_(rho), phi_(phi) {}

  cplx operator()(cplx t) {
    const XiValue v = ev_(t / 2.0);
    evaluations += v.evaluations;
    return std::exp((-t * t + phi_ * t) / (16.0 * rho_)) * v.value;
  }
  cplx bare(cplx t) {
    const XiValue v = ev_(t / 2.0);
    evaluations += v.evaluations;
    return v.value;
  }

  long long evaluations = 0;

 private:
  MellinEvaluator ev_;
  cplx rho_;
  cplx phi_;
};

double bound_of(std::initializer_list<cplx> pts) {
  double b = 0.5;
  for (cplx p : pts) b = std::max(b, std::abs(p.real()));
  return b + 0.5;
}

void require_alpha(cplx alpha, const char* who) {
  if (std::abs(alpha) == 0.0 || !std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    fail(ErrorCode::Domain, std::string(who) + ": alpha must be nonzero");
}

cplx segment(const std::function<cplx(cplx)>& f, cplx z, cplx s, const QuadSpec& spec,
             long long* evals = nullptr) {
  const IntegralResult r = integrate_segment(f, z, s, spec);
  if (evals) *evals += r.evaluations;
  return r.value;
}

cplx root_pi_over(cplx rho) { return std::sqrt(kPi / rho); }

// u = w Xi and its s-derivatives through the product rule, with
// Xi^{(k)}(s) = M[ln^k t Psi e](s/2) / 2^k.
struct WeightedXi {
  cplx u, du, d2u;
};

WeightedXi weighted_xi(cplx rho, cplx alpha, cplx s, const QuadSpec& spec) {
  const cplx c16 = 16.0 * rho;
  const cplx w = transport_weight(rho, alpha, s);
  const cplx l1 = (-2.0 * s + 4.0 / alpha) / c16;
  const cplx l2 = -2.0 / c16;
  const cplx x0 = xi(rho, s, spec).value;
  const cplx x1 = xi_derivative(rho, s, 1, spec).value;
  const cplx x2 = xi_derivative(rho, s, 2, spec).value;
  return {w * x0, w * (l1 * x0 + x1), w * ((l2 + l1 * l1) * x0 + 2.0 * l1 * x1 + x2)};
}

}  // namespace

cplx transport_weight(cplx rho, cplx alpha, cplx s) {
  return std::exp((-s * s + 4.0 * s / alpha) / (16.0 * rho));
}

XiValue transport_integral(cplx rho, cplx alpha, cplx z, cplx z2, const QuadSpec& spec) {
  require_rho(rho, "transport_integral");
  require_alpha(alpha, "transport_integral");
  WeightedKernel k(ThetaOperator::h(alpha), rho, 4.0 / alpha, bound_of({z, z2}), spec);
  XiValue out;
  const IntegralResult r = integrate_segment([&](cplx t) { return k(t); }, z, z2, spec);
  out.value = r.value;
  out.quad_error = r.error_estimate;
  out.evaluations = k.evaluations;
  return out;
}

double fde1_direct_residual(cplx rho, cplx alpha, cplx z, cplx s, const QuadSpec& spec) {
  require_rho(rho, "fde1");
  require_alpha(alpha, "fde1");
  if (z == s) return 0.0;
  const cplx lhs = transport_weight(rho, alpha, s) * xi(rho, s, spec).value;
  const cplx at_z = transport_weight(rho, alpha, z) * xi(rho, z, spec).value;
  const cplx in = transport_integral(rho, alpha, z, s, spec).value;
  return std::abs(lhs - (at_z + in / (4.0 * alpha * rho)));
}

Fde1Residual fde1_residual(cplx rho, cplx alpha, cplx z, cplx s, const QuadSpec& spec) {
  require_rho(rho, "fde1");
  require_alpha(alpha, "fde1");
  if (std::abs(alpha - 2.0) < 1e-12)
    fail(ErrorCode::Degenerate, "fde1: the reflected form is singular at alpha = 2");
  Fde1Residual r;
  r.direct = fde1_direct_residual(rho, alpha, z, s, spec);
  if (z == s) return r;

  const cplx c16 = 16.0 * rho;
  const cplx half = alpha / 2.0 - 1.0;
  const cplx beta = alpha / half;
  auto boundary = [&](cplx x) {
    return std::exp((1.0 - 4.0 / alpha * half * x) / c16) - std::exp(4.0 / alpha * x / c16);
  };
  const cplx lhs = transport_weight(rho, alpha, s) * xi(rho, s, spec).value;
  const cplx at_z = transport_weight(rho, alpha, z) * xi(rho, z, spec).value;
  const cplx in = transport_integral(rho, beta, 1.0 - z, 1.0 - s, spec).value;
  const cplx rhs = at_z + root_pi_over(rho) / 2.0 * (boundary(s) - boundary(z)) +
                   std::exp((4.0 / alpha - 1.0) / c16) * half / (4.0 * alpha * rho) * in;
  r.reflected = std::abs(lhs - rhs);
  return r;
}

cplx weighted_xi_second_derivative(cplx rho, cplx alpha, cplx s, const QuadSpec& spec) {
  require_rho(rho, "second_order");
  require_alpha(alpha, "second_order");
  return weighted_xi(rho, alpha, s, spec).d2u;
}

namespace {

double second_order_impl(cplx rho, cplx alpha, cplx s, const QuadSpec& spec, double sign) {
  require_rho(rho, "second_order");
  require_alpha(alpha, "second_order");
  const WeightedXi u = weighted_xi(rho, alpha, s, spec);
  const cplx c = 4.0 * alpha * rho;
  const cplx g = transport_weight(rho, alpha, s) *
                 mellin_op(ThetaOperator::delta_alpha(alpha), rho, s, spec).value;
  return std::abs(sign * (c * c * u.d2u - u.u) - g);
}

}  // namespace

double second_order_residual(cplx rho, cplx alpha, cplx s, const QuadSpec& spec) {
  return second_order_impl(rho, alpha, s, spec, 1.0);
}

double second_order_residual_as_printed(cplx rho, cplx alpha, cplx s, const QuadSpec& spec) {
  return second_order_impl(rho, alpha, s, spec, -1.0);
}

VopCoefficients vop_coefficients(cplx rho, cplx alpha, std::array<cplx, 2> beta, cplx z,
                                 const QuadSpec& spec) {
  require_rho(rho, "vop_coefficients");
  require_alpha(alpha, "vop_coefficients");
  const cplx c = 4.0 * alpha * rho;
  // cosh((b2 - b1)/c) = 0  <=>  b1 - b2 = pi i c (1/2 + k)
  const cplx q = (beta[0] - beta[1]) / (kPi * cplx(0.0, 1.0) * c) - 0.5;
  const double k = std::round(q.real());
  if (std::abs(beta[0] - beta[1] - kPi * cplx(0.0, 1.0) * c * (0.5 + k)) <= 1e-8)
    fail(ErrorCode::Degenerate, "vop_coefficients: degenerate fundamental system");

  const cplx det = std::cosh((beta[1] - beta[0]) / c);
  const cplx w = transport_weight(rho, alpha, z);
  const cplx xz = xi(rho, z, spec).value;
  const cplx hz = mellin_op(ThetaOperator::h(alpha), rho, z, spec).value;
  const cplx a1 = (beta[0] - z) / c, a2 = (beta[1] - z) / c;
  VopCoefficients v;
  v.A = w / det * (-std::sinh(a2) * xz - std::cosh(a2) * hz);
  v.B = w / det * (std::cosh(a1) * xz + std::sinh(a1) * hz);
  v.beta = beta;
  v.alpha = alpha;
  v.z = z;
  v.rho = rho;
  return v;
}

XiValue vop_solution(const VopCoefficients& v, cplx s, const QuadSpec& spec) {
  require_rho(v.rho, "vop_solution");
  const cplx c = 4.0 * v.alpha * v.rho;
  WeightedKernel g(ThetaOperator::delta_alpha(v.alpha), v.rho, 4.0 / v.alpha,
                   bound_of({v.z, s}), spec);
  XiValue out;
  const cplx in = segment([&](cplx t) { return std::sinh((s - t) / c) * g(t); }, v.z, s, spec);
  out.value = v.A * std::sinh((v.beta[0] - s) / c) + v.B * std::cosh((v.beta[1] - s) / c) + in / c;
  out.evaluations = g.evaluations;
  return out;
}

XiValue chi(cplx rho, cplx phi, cplx alpha, cplx s, cplx z, const QuadSpec& spec) {
  require_rho(rho, "chi");
  WeightedKernel g(ThetaOperator::delta_alpha(alpha), rho, phi, bound_of({z, s}), spec);
  XiValue out;
  out.value = segment([&](cplx t) { return g(t); }, z, s, spec);
  out.evaluations = g.evaluations;
  return out;
}

double chi_transform_residual(cplx rho, cplx phi, cplx alpha, cplx s, cplx z,
                              const QuadSpec& spec) {
  require_rho(rho, "chi_transform");
  const cplx c16 = 16.0 * rho;
  const cplx lhs = chi(rho, phi, alpha, s, z, spec).value;
  WeightedKernel h4(ThetaOperator::h(4.0), rho, 2.0 - phi, bound_of({1.0 - z, 1.0 - s}), spec);
  const cplx hint = segment([&](cplx t) { return h4(t); }, 1.0 - z, 1.0 - s, spec);
  const bool linear = std::abs(phi - 2.0) < 1e-12;
  auto boundary = [&](cplx x) -> cplx {
    if (linear) return x;
    return c16 / (2.0 - phi) * std::exp((2.0 - phi) * x / c16);
  };
  const cplx rhs =
      -std::exp((phi - 1.0) / c16) *
      (chi(rho, 2.0 - phi, alpha, 1.0 - s, 1.0 - z, spec).value +
       alpha * (alpha - 4.0) / 4.0 *
           (hint + root_pi_over(rho) / 2.0 * (boundary(1.0 - s) - boundary(1.0 - z))));
  return std::abs(lhs - rhs);
}

namespace {

double phi1_impl(cplx rho, cplx alpha, cplx s, cplx z, const QuadSpec& spec, bool printed) {
  require_rho(rho, "chi_phi1");
  const cplx c16 = 16.0 * rho;
  const cplx lhs = chi(rho, 1.0, alpha, s, z, spec).value +
                   chi(rho, 1.0, alpha, 1.0 - s, 1.0 - z, spec).value;
  auto f = [&](cplx x) {
    const cplx w = std::exp((-x * x + x) / c16);
    const cplx g = root_pi_over(rho) / 2.0 * std::exp(x / c16);
    return printed ? w * xi(rho, 1.0 - x, spec).value - g : w * xi(rho, x, spec).value + g;
  };
  const cplx rhs = c16 * alpha * (4.0 - alpha) / 4.0 * (f(1.0 - s) - f(1.0 - z));
  return std::abs(lhs - rhs);
}

}  // namespace

double chi_phi1_residual(cplx rho, cplx alpha, cplx s, cplx z, const QuadSpec& spec) {
  return phi1_impl(rho, alpha, s, z, spec, false);
}

double chi_phi1_residual_as_printed(cplx rho, cplx alpha, cplx s, cplx z,
                                    const QuadSpec& spec) {
  return phi1_impl(rho, alpha, s, z, spec, true);
}

XiValue canonical_target(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "canonical_target");
  XiValue v = xi(rho, s, spec);
  const cplx w = std::exp((-s * s + s) / (16.0 * rho));
  v.value *= w;
  v.quad_error *= std::abs(w);
  return v;
}

XiValue tilde_target(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "tilde_target");
  XiValue v = xi_tilde(rho, s, spec);
  const cplx w = std::exp((-s * s + s) / (16.0 * rho));
  v.value *= w;
  v.quad_error *= std::abs(w);
  return v;
}

double canonical_sinh_coeff(cplx rho) {
  return (std::exp(1.0 / (32.0 * rho)) * root_pi_over(rho) / 2.0).real();
}

double canonical_sinh_coeff_as_printed(cplx rho) { return canonical_sinh_coeff(rho) / 2.0; }

namespace {

cplx sinh_coeff(cplx rho) { return std::exp(1.0 / (32.0 * rho)) * root_pi_over(rho) / 2.0; }
cplx cosh_coeff(cplx rho, const QuadSpec& spec, long long* evals) {
  const XiValue v = xi(rho, 0.5, spec);
  *evals += v.evaluations;
  return std::exp(1.0 / (64.0 * rho)) * v.value;
}

// (1/16rho) int_{1/2}^s K((s-t)/16rho) e^{(-t^2+t)/16rho} M[Delta_4 Psi e](t/2) dt
template <class Kernel>
cplx delta4_convolution(cplx rho, cplx s, const ThetaOperator& op, cplx scale, Kernel kernel,
                        const QuadSpec& spec, long long* evals) {
  const cplx c = 16.0 * rho;
  WeightedKernel g(op, rho, 1.0, bound_of({0.5, s}), spec);
  const cplx v = segment([&](cplx t) { return kernel((s - t) / c) * g(t); }, 0.5, s, spec, evals);
  *evals += g.evaluations;
  return scale * v;
}

}  // namespace

DecompositionResult canonical_decomposition(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "canonical_decomposition");
  DecompositionResult d;
  const cplx c = 16.0 * rho;
  d.sinh_coeff = sinh_coeff(rho);
  d.cosh_coeff = cosh_coeff(rho, spec, &d.evaluations);
  d.integral_part = delta4_convolution(rho, s, ThetaOperator::delta4(), 1.0 / c,
                                       [](cplx x) { return std::sinh(x); }, spec, &d.evaluations);
  d.total = d.sinh_coeff * std::sinh((0.5 - s) / c) + d.cosh_coeff * std::cosh((0.5 - s) / c) +
            d.integral_part;
  return d;
}

cplx canonical_integral_polya(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "canonical_integral_polya");
  long long evals = 0;
  // 2t^2 Psi'' + 3t Psi' = (2 theta^2 + theta) Psi
  const ThetaOperator kernel = ThetaOperator::from_theta_poly({0.0, 1.0, 2.0});
  return delta4_convolution(rho, s, kernel, 1.0 / (2.0 * rho),
                            [](cplx x) { return std::sinh(x); }, spec, &evals);
}

APm a_pm(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "a_pm");
  const cplx c = 16.0 * rho;
  WeightedKernel g(ThetaOperator::delta4(), rho, 1.0, bound_of({0.5, s}), spec);
  APm out;
  out.plus = segment([&](cplx t) { return 2.0 * std::cosh((0.5 - t) / c) * g(t); }, 0.5, s, spec) /
             (2.0 * c);
  out.minus = segment([&](cplx t) { return 2.0 * std::sinh((0.5 - t) / c) * g(t); }, 0.5, s, spec) /
              (2.0 * c);
  return out;
}

cplx a_pm_reconstruction(cplx rho, cplx s, const QuadSpec& spec) {
  const APm a = a_pm(rho, s, spec);
  long long evals = 0;
  const cplx c = 16.0 * rho;
  return (sinh_coeff(rho) - a.plus) * std::sinh((0.5 - s) / c) +
         (cosh_coeff(rho, spec, &evals) + a.minus) * std::cosh((0.5 - s) / c);
}

DecompositionResult tilde_decomposition(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "tilde_decomposition");
  DecompositionResult d;
  const cplx c = 16.0 * rho;
  d.sinh_coeff = -cosh_coeff(rho, spec, &d.evaluations);
  d.cosh_coeff = -sinh_coeff(rho);
  d.integral_part = delta4_convolution(rho, s, ThetaOperator::delta4(), 1.0 / c,
                                       [](cplx x) { return std::cosh(x); }, spec, &d.evaluations);
  d.total = d.sinh_coeff * std::sinh((0.5 - s) / c) + d.cosh_coeff * std::cosh((0.5 - s) / c) +
            d.integral_part;
  return d;
}

namespace {

// n nested integrals int_{1/2}^{s} sinh((s - t)/c) (...) dt around f.
cplx nested_sinh(int n, cplx c, cplx s, const std::function<cplx(cplx)>& f, const QuadSpec& spec) {
  if (n == 0) return f(s);
  return segment(
      [&](cplx t) { return std::sinh((s - t) / c) * nested_sinh(n - 1, c, t, f, spec); }, 0.5, s,
      spec);
}

void require_order(int n, int lo, const char* who) {
  if (n < lo || n > 3)
    fail(ErrorCode::UnsupportedOrder, std::string(who) + ": order out of range");
}

}  // namespace

cplx iterated_P(cplx rho, int n, cplx s, const QuadSpec& spec) {
  require_rho(rho, "iterated_P");
  require_order(n, 0, "iterated_P");
  const cplx c = 16.0 * rho;
  return nested_sinh(n, c, s, [&](cplx t) { return std::cosh((0.5 - t) / c); }, spec);
}

XiValue iterated_I(cplx rho, int n, cplx s, const QuadSpec& spec) {
  require_rho(rho, "iterated_I");
  require_order(n, 1, "iterated_I");
  WeightedKernel g(ThetaOperator::delta4_power(n), rho, 1.0, bound_of({0.5, s}), spec);
  XiValue out;
  out.value = nested_sinh(n, 16.0 * rho, s, [&](cplx t) { return g(t); }, spec);
  out.evaluations = g.evaluations;
  return out;
}

cplx p1_closed(cplx rho, cplx s) {
  const cplx x = 0.5 - s;
  return x / 2.0 * std::sinh(x / (16.0 * rho));
}

cplx p1_as_printed(cplx rho, cplx s) {
  const cplx x = 0.5 - s;
  return (x * std::sinh(x / (16.0 * rho)) - 8.0 * rho * std::cosh(x / (16.0 * rho))) / 2.0;
}

double iterated_expansion_residual(cplx rho, int n, cplx s, const QuadSpec& spec) {
  require_rho(rho, "iterated_expansion");
  require_order(n, 1, "iterated_expansion");
  const cplx c = 16.0 * rho;
  cplx rhs = sinh_coeff(rho) * std::sinh((0.5 - s) / c);
  cplx cpow = 1.0;
  for (int i = 0; i < n; ++i) {
    const ThetaOperator op = i == 0 ? ThetaOperator::plain() : ThetaOperator::delta4_power(i);
    rhs += std::exp(1.0 / (64.0 * rho)) * mellin_op(op, rho, 0.5, spec).value *
           iterated_P(rho, i, s, spec) / cpow;
    cpow *= c;
  }
  rhs += iterated_I(rho, n, s, spec).value / cpow;
  return std::abs(canonical_target(rho, s, spec).value - rhs);
}

double msym_residual(cplx rho, cplx alpha, cplx s, const QuadSpec& spec) {
  require_rho(rho, "msym");
  const ThetaOperator d = ThetaOperator::delta_alpha(alpha);
  MellinEvaluator ev(d, rho, 0, bound_of({s, 1.0 - s}) / 2.0, spec);
  const cplx diff = ev(s / 2.0).value - ev((1.0 - s) / 2.0).value;
  const cplx h4 = xi_tilde(rho, 1.0 - s, spec).value;
  const cplx g = root_pi_over(rho) * std::exp((s - 1.0) * (s - 1.0) / (16.0 * rho)) / 2.0;
  return std::abs(diff - alpha * (alpha - 4.0) / 4.0 * (h4 + g));
}

double newb_closure_residual(cplx rho, cplx s, const QuadSpec& spec) {
  require_rho(rho, "newb_closure");
  const cplx c = 16.0 * rho;
  auto unweighted = [&](cplx x) {
    return std::exp((x * x - x) / c) * canonical_decomposition(rho, x, spec).total;
  };
  return std::abs(unweighted(s) - unweighted(1.0 - s) - telescope_rhs(rho, s, 0));
}

XiValue iterated_first_order_integral(cplx rho, cplx alpha, cplx z1, cplx z2, cplx s,
                                      const QuadSpec& spec) {
  require_rho(rho, "iterated_first_order");
  require_alpha(alpha, "iterated_first_order");
  WeightedKernel g(ThetaOperator::h_power(alpha, 2), rho, 4.0 / alpha, bound_of({z1, z2, s}),
                   spec);
  XiValue out;
  out.value = segment(
      [&](cplx t1) { return segment([&](cplx t2) { return g(t2); }, z2, t1, spec); }, z1, s, spec);
  out.evaluations = g.evaluations;
  return out;
}

double iterated_first_order_residual(cplx rho, cplx alpha, cplx z1, cplx z2, cplx s,
                                     const QuadSpec& spec) {
  const cplx inner = iterated_first_order_integral(rho, alpha, z1, z2, s, spec).value;
  const cplx c = 4.0 * alpha * rho;
  const cplx lhs = transport_weight(rho, alpha, s) * xi(rho, s, spec).value;
  const cplx rhs = transport_weight(rho, alpha, z1) * xi(rho, z1, spec).value +
                   (s - z1) * transport_weight(rho, alpha, z2) *
                       mellin_op(ThetaOperator::h(alpha), rho, z2, spec).value / c +
                   inner / (c * c);
  return std::abs(lhs - rhs);
}

std::optional<cplx> secant_root(const std::function<cplx(cplx)>& f, cplx z0, cplx z1,
                                double tol, int max_iter) {
  cplx f0 = f(z0), f1 = f(z1);
  for (int i = 0; i < max_iter; ++i) {
    if (f1 == f0) break;
    const cplx z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
    if (!std::isfinite(z2.real()) || !std::isfinite(z2.imag())) break;
    z0 = z1;
    f0 = f1;
    z1 = z2;
    f1 = f(z1);
    if (std::abs(z1 - z0) <= tol * std::max(1.0, std::abs(z1))) return z1;
  }
  return std::nullopt;
}

}  // namespace dxi
