#include "dxi/theta.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dxi {

namespace {

constexpr double kPi = std::numbers::pi;
// e^{-u} underflows past this; the polynomial multiplier must not be
// evaluated there (u^6 overflows long before e^{-u} comes back).
constexpr double kUnderflowArg = 740.0;
constexpr double kReflectBelow = 0.2;

using Poly = std::vector<cplx>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == cplx(0.0)) p.pop_back();
}

// sum_k c_k p_k(u) where theta^k e^{-u} = p_k(u) e^{-u}, u = pi n^2 t.
// Since theta u = u, theta(q(u)e^{-u}) = (u q'(u) - u q(u)) e^{-u}.
Poly term_poly_of(const Poly& theta) {
  Poly out(theta.size(), 0.0);
  Poly p{1.0};
  for (size_t k = 0; k < theta.size(); ++k) {
    for (size_t j = 0; j < p.size(); ++j) out[j] += theta[k] * p[j];
    Poly next(p.size() + 1, 0.0);
    for (size_t j = 1; j < p.size(); ++j) next[j] += double(j) * p[j];
    for (size_t j = 0; j < p.size(); ++j) next[j + 1] -= p[j];
    p = std::move(next);
  }
  trim(out);
  return out;
}

// L(theta) -> L(-theta - 1/2)
Poly reflect_poly(const Poly& c) {
  Poly out(c.size(), 0.0);
  Poly acc{1.0};
  const Poly base{-0.5, -1.0};
  for (size_t k = 0; k < c.size(); ++k) {
    for (size_t j = 0; j < acc.size(); ++j) out[j] += c[k] * acc[j];
    acc = poly_mul(acc, base);
  }
  return out;
}

cplx horner(const Poly& p, cplx x) {
  cplx r = 0.0;
  for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

double abs_sum(const Poly& p) {
  double s = 0.0;
  for (auto& c : p) s += std::abs(c);
  return s;
}

cplx series(const Poly& term, double t, const ThetaTruncation& tr) {
  const int deg = static_cast<int>(term.size()) - 1;
  const int n_max = tr.terms_weighted(t, deg, abs_sum(term));
  cplx acc = 0.0;
  // Summed from the small tail end towards n = 1.
  for (int n = n_max; n >= 1; --n) {
    const double u = kPi * double(n) * double(n) * t;
    if (u > kUnderflowArg) continue;
    acc += horner(term, u) * std::exp(-u);
  }
  return acc;
}

}  // namespace

ThetaOperator::ThetaOperator(Kind k, std::vector<cplx> coeffs, cplx alpha, int power)
    : kind_(k), alpha_(alpha), power_(power), theta_(std::move(coeffs)) {
  trim(theta_);
  if (degree() > kMaxThetaDegree)
    fail(ErrorCode::UnsupportedOrder, "theta operator degree above 6 is not supported");
  term_ = term_poly_of(theta_);
}

ThetaOperator ThetaOperator::plain() { return {Kind::Plain, {1.0}}; }

ThetaOperator ThetaOperator::h(cplx a) { return {Kind::H, {1.0, a}, a}; }

ThetaOperator ThetaOperator::delta_alpha(cplx a) {
  // (1 + a theta)^2 - 1
  return {Kind::DeltaAlpha, {0.0, 2.0 * a, a * a}, a};
}

ThetaOperator ThetaOperator::delta4() { return {Kind::Delta4, {0.0, 8.0, 16.0}, 4.0}; }

ThetaOperator ThetaOperator::delta4_h4() {
  return {Kind::Delta4H4, poly_mul({0.0, 8.0, 16.0}, {1.0, 4.0}), 4.0};
}

ThetaOperator ThetaOperator::delta4_power(int n) {
  if (n < 0 || n > 3)
    fail(ErrorCode::UnsupportedOrder, "Delta4 powers are supported for n <= 3");
  Poly p{1.0};
  for (int i = 0; i < n; ++i) p = poly_mul(p, {0.0, 8.0, 16.0});
  return {Kind::Delta4Power, p, 4.0, n};
}

ThetaOperator ThetaOperator::h_power(cplx a, int n) {
  if (n < 0 || n > kMaxThetaDegree)
    fail(ErrorCode::UnsupportedOrder, "H powers are supported for n <= 6");
  Poly p{1.0};
  for (int i = 0; i < n; ++i) p = poly_mul(p, {1.0, a});
  return {Kind::Custom, p, a, n};
}

ThetaOperator ThetaOperator::from_theta_poly(std::vector<cplx> c) {
  if (c.empty()) c.push_back(0.0);
  return {Kind::Custom, std::move(c)};
}

ThetaOperator ThetaOperator::reflected() const {
  return {Kind::Custom, reflect_poly(theta_)};
}

cplx ThetaOperator::eval(cplx th) const { return horner(theta_, th); }

ThetaOperator ThetaOperator::operator*(const ThetaOperator& o) const {
  return {Kind::Custom, poly_mul(theta_, o.theta_)};
}

std::string ThetaOperator::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Plain: return "Plain";
    case Kind::H: os << "H(" << alpha_.real() << (alpha_.imag() ? "+" + std::to_string(alpha_.imag()) + "i" : "") << ")"; return os.str();
    case Kind::Delta4: return "Delta4";
    case Kind::Delta4H4: return "Delta4H4";
    case Kind::Delta4Power: return "Delta4^" + std::to_string(power_);
    case Kind::DeltaAlpha: os << "Delta(" << alpha_.real() << ")"; return os.str();
    case Kind::Custom: break;
  }
  return "Custom";
}

int ThetaTruncation::terms(double t, int k) const { return terms_weighted(t, k, 1.0); }

int ThetaTruncation::terms_weighted(double t, int k, double scale) const {
  if (!(t > 0.0)) fail(ErrorCode::Domain, "theta series needs t > 0");
  if (scale <= 0.0) return 1;
  for (int n = 1;; ++n) {
    const double u = kPi * double(n) * double(n) * t;
    if (u > kUnderflowArg) return n;
    if (u < double(k)) continue;  // summand still increasing
    const double head = scale * std::pow(std::max(1.0, u), k) * std::exp(-u);
    const double q = -std::expm1(-kPi * (2.0 * n + 1.0) * t);
    if (head / q <= eps) return n;
  }
}

double psi(double t, int k, const ThetaTruncation& tr) {
  if (!(t > 0.0)) fail(ErrorCode::Domain, "psi: t must be positive");
  if (k < 0 || k > kMaxPsiDerivative)
    fail(ErrorCode::UnsupportedOrder, "psi: derivative order above 3 is not supported");
  if (t < kReflectBelow) {
    // d^k/dt^k = t^{-k} theta (theta - 1) ... (theta - k + 1)
    Poly p{1.0};
    for (int j = 0; j < k; ++j) p = poly_mul(p, {-double(j), 1.0});
    auto op = ThetaOperator::from_theta_poly(p);
    return (apply_theta_op(op, t, tr) * std::pow(t, -k)).real();
  }
  const int n_max = tr.terms(t, k);
  double acc = 0.0;
  for (int n = n_max; n >= 1; --n) {
    const double a = kPi * double(n) * double(n);
    if (a * t > kUnderflowArg) continue;
    acc += std::pow(-a, k) * std::exp(-a * t);
  }
  return acc;
}

cplx apply_theta_op_series(const ThetaOperator& op, double t, const ThetaTruncation& tr) {
  if (!(t > 0.0)) fail(ErrorCode::Domain, "theta operator: t must be positive");
  return series(op.term_poly(), t, tr);
}

cplx apply_theta_op(const ThetaOperator& op, double t, const ThetaTruncation& tr) {
  if (!(t > 0.0)) fail(ErrorCode::Domain, "theta operator: t must be positive");
  if (t >= kReflectBelow) return series(op.term_poly(), t, tr);
  // (L Psi)(t) = t^{-1/2} (L~ Psi)(1/t) + L(-1/2) t^{-1/2}/2 - L(0)/2
  const double r = 1.0 / std::sqrt(t);
  const ThetaOperator refl = op.reflected();
  return r * series(refl.term_poly(), 1.0 / t, tr) + op.eval(-0.5) * r / 2.0 -
         op.eval(0.0) / 2.0;
}

double functional_residual(ReflectionKind kind, double t, cplx alpha,
                           const ThetaTruncation& tr) {
  if (!(t > 0.0)) fail(ErrorCode::Domain, "functional_residual: t must be positive");
  const double r = 1.0 / std::sqrt(t);
  auto S = [&](const ThetaOperator& op, double x) { return apply_theta_op_series(op, x, tr); };
  switch (kind) {
    case ReflectionKind::Psi: {
      auto P = ThetaOperator::plain();
      return std::abs(S(P, t) - r * S(P, 1.0 / t) - (r - 1.0) / 2.0);
    }
    case ReflectionKind::H4: {
      auto H = ThetaOperator::h(4.0);
      return std::abs(S(H, t) + r * S(H, 1.0 / t) + (r + 1.0) / 2.0);
    }
    case ReflectionKind::Delta4: {
      auto D = ThetaOperator::delta4();
      return std::abs(S(D, t) - r * S(D, 1.0 / t));
    }
    case ReflectionKind::DeltaAlpha: {
      if (alpha == cplx(0.0)) fail(ErrorCode::Domain, "DeltaAlpha needs alpha != 0");
      auto D = ThetaOperator::delta_alpha(alpha);
      auto H = ThetaOperator::h(4.0);
      const cplx rhs =
          r * (S(D, 1.0 / t) + alpha * (alpha - 4.0) / 4.0 * (S(H, 1.0 / t) + 0.5));
      return std::abs(S(D, t) - rhs);
    }
  }
  return 0.0;
}

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::UnsupportedOrder: return "unsupported-order";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace dxi
