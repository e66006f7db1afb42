#include "dxi/xi_core.hpp"

#include <cmath>
#include <numbers>

namespace dxi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kReflectBelow = 0.2;
constexpr double kCancellationLimit = 1e12;

XiValue combine(std::initializer_list<std::pair<cplx, const XiValue*>> parts) {
  XiValue out;
  for (auto& [w, v] : parts) {
    out.value += w * v->value;
    out.quad_error += std::abs(w) * v->quad_error;
    out.evaluations += v->evaluations;
    out.precision_warning = out.precision_warning || v->precision_warning;
  }
  return out;
}

}  // namespace

void require_rho(cplx rho, const char* who) {
  if (!(rho.real() > 0.0) || !std::isfinite(rho.imag()) || !std::isfinite(rho.real()))
    fail(ErrorCode::Domain, std::string(who) + ": Re(rho) must be positive");
}

MellinEvaluator::MellinEvaluator(std::optional<ThetaOperator> op, cplx rho, int log_power,
                                 double re_arg_bound, const QuadSpec& spec)
    : op_(std::move(op)), rho_(rho), m_(log_power), spec_(spec) {
  require_rho(rho, "mellin");
  if (log_power < 0) fail(ErrorCode::Domain, "mellin: log power must be nonnegative");
  if (op_) refl_ = op_->reflected();
  reset(std::max(std::abs(re_arg_bound), 0.0));
}

void MellinEvaluator::reset(double re_bound) const {
  re_bound_ = re_bound;
  // Envelope e^{b|x| - Re(rho) x^2} with b >= max(|Re a - 1/2|, |Re a|).
  radius_ = gaussian_truncation_radius(rho_.real(), re_bound + 0.5, spec_.abs_tol, m_);
  levels_.clear();
}

cplx kernel_times_exp(const ThetaOperator* op, const ThetaOperator* refl, double x,
                      cplx exponent) {
  if (!op) return std::exp(exponent);
  const double t = std::exp(x);
  if (t >= kReflectBelow || !std::isfinite(1.0 / t))
    return apply_theta_op_series(*op, t) * std::exp(exponent);
  // (L Psi)(t) = t^{-1/2} [(L~ Psi)(1/t) + L(-1/2)/2] - L(0)/2
  const cplx head = apply_theta_op_series(*refl, 1.0 / t) + op->eval(-0.5) / 2.0;
  return head * std::exp(exponent - 0.5 * x) - op->eval(0.0) / 2.0 * std::exp(exponent);
}

cplx MellinEvaluator::node_value(double x) const {
  const double xm = m_ == 0 ? 1.0 : std::pow(x, m_);
  return xm * kernel_times_exp(op_ ? &*op_ : nullptr, refl_ ? &*refl_ : nullptr, x,
                               -rho_ * x * x);
}

const std::vector<cplx>& MellinEvaluator::level(size_t idx, double x0, double step,
                                                long long count) const {
  while (levels_.size() <= idx) levels_.emplace_back();
  auto& v = levels_[idx];
  if (v.empty()) {
    v.resize(static_cast<size_t>(count));
    for (long long j = 0; j < count; ++j) v[j] = node_value(x0 + double(j) * step);
  }
  return v;
}

XiValue MellinEvaluator::operator()(cplx a) const {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
    fail(ErrorCode::Domain, "mellin: non-finite argument");
  if (std::abs(a.real()) > re_bound_) reset(1.25 * std::abs(a.real()) + 1.0);
  QuadSpec spec = spec_;
  const double omega = std::abs(a.imag()) + 2.0 * std::abs(rho_.imag()) * radius_;
  spec.max_step = std::min(spec.max_step, oscillation_step(omega));
  size_t call = 0;
  double h0 = 0.0;
  auto batch = [&](const TrapezoidLevel& lv) {
    if (call == 0) h0 = lv.step;
    const auto& v = level(call++, lv.x0, lv.step, lv.count);
    return exp_weighted_sum(v, lv.x0, lv.step, a);
  };
  const IntegralResult r = trapezoid_ladder(radius_, batch, spec);
  XiValue out{r.value, r.error_estimate, r.evaluations, false};
  // Cancellation estimate from the coarse level.
  if (!levels_.empty()) {
    double mass = 0.0;
    const auto& v0 = levels_[0];
    for (size_t j = 0; j < v0.size(); ++j)
      mass += std::abs(v0[j]) * std::exp(a.real() * (-radius_ + double(j) * h0));
    mass *= h0;
    out.precision_warning = mass > kCancellationLimit * std::abs(r.value);
  }
  return out;
}

XiValue mellin(const MellinKernel& k, const QuadSpec& spec) {
  MellinEvaluator ev(k.op, k.rho, k.log_power, std::abs(k.argument.real()), spec);
  return ev(k.argument);
}

XiValue xi(cplx rho, cplx s, const QuadSpec& spec) {
  return mellin({ThetaOperator::plain(), 0, rho, s / 2.0}, spec);
}

XiValue xi_derivative(cplx rho, cplx s, int k, const QuadSpec& spec) {
  if (k < 0) fail(ErrorCode::Domain, "xi_derivative: order must be nonnegative");
  XiValue v = mellin({ThetaOperator::plain(), k, rho, s / 2.0}, spec);
  const double f = std::ldexp(1.0, -k);
  v.value *= f;
  v.quad_error *= f;
  return v;
}

XiValue xi_sum_m(cplx rho, cplx s, int m, const QuadSpec& spec) {
  if (m < 0) fail(ErrorCode::Domain, "xi_sum_m: m must be nonnegative");
  MellinEvaluator ev(ThetaOperator::plain(), rho, 0, std::abs(s.real()) / 2.0 + m, spec);
  XiValue out;
  for (int l = 0; l <= m; ++l) {
    const XiValue v = ev((s + double(l)) / 2.0);
    out = combine({{1.0, &out}, {1.0, &v}});
  }
  return out;
}

XiValue xi_tilde_sum_m(cplx rho, cplx s, int m, const QuadSpec& spec) {
  if (m < 0) fail(ErrorCode::Domain, "xi_tilde_sum_m: m must be nonnegative");
  MellinEvaluator ev(ThetaOperator::h(4.0), rho, 0, std::abs(s.real()) / 2.0 + m, spec);
  XiValue out;
  for (int l = 0; l <= m; ++l) {
    const XiValue v = ev((s + double(l)) / 2.0);
    out = combine({{1.0, &out}, {l % 2 ? -1.0 : 1.0, &v}});
  }
  return out;
}

XiValue mellin_op(const ThetaOperator& op, cplx rho, cplx s, const QuadSpec& spec) {
  return mellin({op, 0, rho, s / 2.0}, spec);
}

XiValue xi_tilde(cplx rho, cplx s, const QuadSpec& spec) {
  return mellin_op(ThetaOperator::h(4.0), rho, s, spec);
}

XiValue xi_tilde_via_moments(cplx rho, cplx s, const QuadSpec& spec) {
  const XiValue x0 = xi(rho, s, spec);
  const XiValue x1 = xi_derivative(rho, s, 1, spec);
  return combine({{1.0 - 2.0 * s, &x0}, {16.0 * rho, &x1}});
}

XiValue mellin_delta4(cplx rho, cplx s, const QuadSpec& spec) {
  return mellin_op(ThetaOperator::delta4(), rho, s, spec);
}

double h_connection_residual(cplx rho, cplx alpha, cplx s, const QuadSpec& spec) {
  const XiValue direct = mellin_op(ThetaOperator::h(alpha), rho, s, spec);
  const XiValue x0 = xi(rho, s, spec);
  const XiValue x1 = xi_derivative(rho, s, 1, spec);
  return std::abs(direct.value - ((1.0 - alpha * s / 2.0) * x0.value + 4.0 * alpha * rho * x1.value));
}

SecondOrderCheck second_order_identity(cplx rho, cplx s, const QuadSpec& spec) {
  const cplx d4 = mellin_delta4(rho, s, spec).value;
  const cplx x0 = xi(rho, s, spec).value;
  const cplx x1 = xi_derivative(rho, s, 1, spec).value;
  const cplx x2 = xi_derivative(rho, s, 2, spec).value;
  const cplx c = 16.0 * rho;
  const cplx tail = 32.0 * rho * (1.0 - 2.0 * s) * x1 + c * c * x2;
  return {d4, 4.0 * (s * (s - 1.0) - 8.0 * rho) * x0 + tail,
          4.0 * s * (s - 1.0 - 8.0 * rho) * x0 + tail};
}

XiValue xi_drho(cplx rho, cplx s, const QuadSpec& spec) {
  XiValue v = mellin({ThetaOperator::plain(), 2, rho, s / 2.0}, spec);
  v.value = -v.value;
  return v;
}

double heat_residual(cplx rho, cplx s, const QuadSpec& spec) {
  const XiValue m2 = mellin({ThetaOperator::plain(), 2, rho, s / 2.0}, spec);
  const cplx d_rho = -m2.value;
  const cplx d_ss = m2.value / 4.0;
  return std::abs(d_rho + 4.0 * d_ss);
}

cplx telescope_rhs(cplx rho, cplx s, int m) {
  return std::sqrt(kPi / rho) *
         (std::exp((s - 1.0) * (s - 1.0) / (16.0 * rho)) -
          std::exp((s + double(m)) * (s + double(m)) / (16.0 * rho))) / 2.0;
}

cplx gauss_transform(cplx rho, cplx a) { return std::sqrt(kPi / rho) * std::exp(a * a / (4.0 * rho)); }

}  // namespace dxi
