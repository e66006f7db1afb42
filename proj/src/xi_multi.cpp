#include "dxi/xi_multi.hpp"

#include <cmath>
#include <numbers>

namespace dxi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCancellationLimit = 1e12;

using Moments = std::array<int, 3>;

ThetaOperator axis_operator(MultiVariant v) {
  return v == MultiVariant::Jensen ? ThetaOperator::delta4() : ThetaOperator::plain();
}

void check_params(const MultiXiParams& p, const char* who) {
  const int d = p.rho.dim();
  if (d < 1 || d > 3) fail(ErrorCode::Domain, std::string(who) + ": dimension must be 1..3");
  if (static_cast<int>(p.s.size()) != d)
    fail(ErrorCode::Domain, std::string(who) + ": s has the wrong length");
  for (const cplx& z : p.s)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      fail(ErrorCode::Domain, std::string(who) + ": non-finite s");
  p.rho.require_convergence(who);
}

void check_index(int i, int d, const char* who) {
  if (i < 0 || i >= d) fail(ErrorCode::Domain, std::string(who) + ": index out of range");
}

// Inverse of a real symmetric matrix of size <= 2 given as a dense block.
std::vector<std::vector<double>> small_inverse(const std::vector<std::vector<double>>& a) {
  const size_t n = a.size();
  if (n == 1) return {{1.0 / a[0][0]}};
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  return {{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}};
}

double radius_from_envelope(double rho_i, double beta, double kappa, double base_log, int m) {
  double x = 1.0;
  for (int it = 0; it < 8; ++it) {
    const double l = base_log + kappa + (m > 0 ? m * std::log(std::max(x, 1.0)) : 0.0);
    x = (std::abs(beta) + std::sqrt(beta * beta + 4.0 * rho_i * std::max(l, 0.0))) / (2.0 * rho_i);
  }
  return std::max(x, 2.0);
}

// Also used for d == 1, so the per-axis rule is the same everywhere.
std::array<double, 3> radii_impl(const RhoMatrix& rho, const std::vector<cplx>& s, double tol,
                                 int m) {
  const int d = rho.dim();
  std::array<double, 3> out{0.0, 0.0, 0.0};
  std::vector<double> b(d);
  for (int i = 0; i < d; ++i) {
    const double half = s[i].real() / 2.0;
    b[i] = std::max(std::abs(half - 0.5), std::abs(half));
  }
  const double base = std::log(1.0 / tol) + 5.0;
  for (int i = 0; i < d; ++i) {
    std::vector<int> y;
    for (int j = 0; j < d; ++j)
      if (j != i) y.push_back(j);
    const double aii = rho(i, i).real();
    if (y.empty()) {
      out[i] = radius_from_envelope(aii, b[i], 0.0, base, m);
      continue;
    }
    std::vector<std::vector<double>> ayy(y.size(), std::vector<double>(y.size()));
    std::vector<double> ayi(y.size());
    for (size_t p = 0; p < y.size(); ++p) {
      ayi[p] = rho(y[p], i).real();
      for (size_t q = 0; q < y.size(); ++q) ayy[p][q] = rho(y[p], y[q]).real();
    }
    const auto inv = small_inverse(ayy);
    double schur = aii;
    for (size_t p = 0; p < y.size(); ++p)
      for (size_t q = 0; q < y.size(); ++q) schur -= ayi[p] * inv[p][q] * ayi[q];
    // The remaining axes contribute a Gaussian volume factor.
    const double det_yy = y.size() == 1 ? ayy[0][0] : ayy[0][0] * ayy[1][1] - ayy[0][1] * ayy[1][0];
    const double vol = 0.5 * double(y.size()) * std::log(kPi) - 0.5 * std::log(det_yy);
    double worst = 0.0;
    const int patterns = 1 << d;
    for (int mask = 0; mask < patterns; ++mask) {
      std::vector<double> c(d);
      for (int j = 0; j < d; ++j) c[j] = (mask >> j & 1) ? -b[j] : b[j];
      std::vector<double> u(y.size(), 0.0);  // A_yy^{-1} c_y
      for (size_t p = 0; p < y.size(); ++p)
        for (size_t q = 0; q < y.size(); ++q) u[p] += inv[p][q] * c[y[q]];
      double beta = c[i];
      double kappa = 0.0;
      for (size_t p = 0; p < y.size(); ++p) {
        beta -= u[p] * ayi[p];
        kappa += 0.25 * c[y[p]] * u[p];
      }
      worst = std::max(worst, radius_from_envelope(schur, beta, kappa + std::max(vol, 0.0), base, m));
    }
    out[i] = worst;
  }
  return out;
}

struct MultiSetup {
  QuadSpec spec;
  ThetaOperator op;
  ThetaOperator refl;
};

MultiSetup setup(const MultiXiParams& p, const QuadSpec& base, int m) {
  MultiSetup st{base, axis_operator(p.variant), axis_operator(p.variant).reflected()};
  const int d = p.rho.dim();
  const auto radii = radii_impl(p.rho, p.s, base.abs_tol, m);
  for (int i = 0; i < d; ++i)
    if (!(st.spec.trunc_radius[i] > 0.0)) st.spec.trunc_radius[i] = radii[i];
  double omega = 0.0;
  for (int i = 0; i < d; ++i)
    omega = std::max(omega, std::abs(p.s[i].imag()) / 2.0 +
                                2.0 * std::abs(p.rho(i, i).imag()) * st.spec.trunc_radius[i]);
  st.spec.max_step = std::min(st.spec.max_step, oscillation_step(omega));
  return st;
}

XiValue integrate_multi(const MultiXiParams& p, const Moments& mom, const QuadSpec& base) {
  const int d = p.rho.dim();
  const int m = mom[0] + mom[1] + mom[2];
  if (d == 1) {
    MellinEvaluator ev(axis_operator(p.variant), p.rho(0, 0), mom[0],
                       std::abs(p.s[0].real()) / 2.0, base);
    return ev(p.s[0] / 2.0);
  }
  const MultiSetup st = setup(p, base, m);
  std::vector<std::function<cplx(double)>> axis;
  std::vector<std::function<cplx(double)>> envelope;
  for (int i = 0; i < d; ++i) {
    const cplx si = p.s[i];
    const cplx rii = p.rho(i, i);
    const int mi = mom[i];
    const ThetaOperator* op = &st.op;
    const ThetaOperator* refl = &st.refl;
    axis.push_back([=](double x) {
      const double xm = mi == 0 ? 1.0 : std::pow(x, mi);
      return xm * kernel_times_exp(op, refl, x, si * x / 2.0 - rii * x * x);
    });
    envelope.push_back([=](double x) {
      const double xm = mi == 0 ? 1.0 : std::pow(std::abs(x), mi);
      return cplx(xm * std::abs(kernel_times_exp(op, refl, x, si * x / 2.0 - rii * x * x)));
    });
  }
  std::array<std::array<cplx, 3>, 3> coupling{};
  std::array<std::array<cplx, 3>, 3> re_coupling{};
  bool complex_input = false;
  for (int i = 0; i < d; ++i) {
    complex_input = complex_input || p.s[i].imag() != 0.0 || p.rho(i, i).imag() != 0.0;
    for (int j = i + 1; j < d; ++j) {
      coupling[i][j] = p.rho(i, j);
      re_coupling[i][j] = p.rho(i, j).real();
      complex_input = complex_input || p.rho(i, j).imag() != 0.0;
    }
  }
  const IntegralResult r = coupled_integrate(axis, coupling, st.spec);
  XiValue out{r.value, r.error_estimate, r.evaluations, false};
  if (complex_input) {
    // Mass of |integrand| on a coarse grid; only the order of magnitude matters.
    QuadSpec coarse = st.spec;
    coarse.rel_tol = 1e-2;
    coarse.abs_tol = 1e-300;
    coarse.max_step = 0.5;
    try {
      const IntegralResult mass = coupled_integrate(envelope, re_coupling, coarse);
      out.evaluations += mass.evaluations;
      out.precision_warning = std::abs(mass.value) > kCancellationLimit * std::abs(r.value);
    } catch (const NonConvergenceError& e) {
      out.precision_warning = std::abs(e.best_estimate()) > kCancellationLimit * std::abs(r.value);
    }
  }
  return out;
}

}  // namespace

std::array<double, 3> multi_truncation_radii(const RhoMatrix& rho, const std::vector<cplx>& s,
                                             double abs_tol, int log_power) {
  check_params({rho, s, MultiVariant::Theta}, "multi_truncation_radii");
  if (!(abs_tol > 0.0)) fail(ErrorCode::Domain, "multi_truncation_radii: abs_tol must be positive");
  return radii_impl(rho, s, abs_tol, log_power);
}

XiValue xi_d(const MultiXiParams& p) { return xi_d(p, QuadSpec::for_dimension(p.rho.dim())); }

XiValue xi_d(const MultiXiParams& p, const QuadSpec& spec) {
  check_params(p, "xi_d");
  return integrate_multi(p, {0, 0, 0}, spec);
}

XiValue xi_d_moment(const MultiXiParams& p, int i, int j, const QuadSpec& spec) {
  check_params(p, "xi_d_moment");
  check_index(i, p.rho.dim(), "xi_d_moment");
  check_index(j, p.rho.dim(), "xi_d_moment");
  Moments mom{0, 0, 0};
  ++mom[i];
  ++mom[j];
  return integrate_multi(p, mom, spec);
}

XiValue xi_d_drho(const MultiXiParams& p, int i, int j, const QuadSpec& spec) {
  XiValue v = xi_d_moment(p, i, j, spec);
  const double f = i == j ? -1.0 : -2.0;
  v.value *= f;
  v.quad_error *= std::abs(f);
  return v;
}

double jensen_flip_residual(const RhoMatrix& rho, const std::vector<cplx>& s, int k) {
  return jensen_flip_residual(rho, s, k, QuadSpec::for_dimension(rho.dim()));
}

double jensen_flip_residual(const RhoMatrix& rho, const std::vector<cplx>& s, int k,
                            const QuadSpec& spec) {
  const MultiXiParams p{rho, s, MultiVariant::Jensen};
  check_params(p, "jensen_flip_residual");
  check_index(k, rho.dim(), "jensen_flip_residual");
  MultiXiParams q{flip_k(rho, k), s, MultiVariant::Jensen};
  q.s[k] = 1.0 - q.s[k];
  return std::abs(xi_d(p, spec).value - xi_d(q, spec).value);
}

double heat_residual_multi(const RhoMatrix& rho, const std::vector<cplx>& s, int i, int j) {
  return heat_residual_multi(rho, s, i, j, QuadSpec::for_dimension(rho.dim()));
}

double heat_residual_multi(const RhoMatrix& rho, const std::vector<cplx>& s, int i, int j,
                           const QuadSpec& spec) {
  const MultiXiParams p{rho, s, MultiVariant::Theta};
  const XiValue mom = xi_d_moment(p, i, j, spec);
  const double delta = i == j ? 1.0 : 0.0;
  const cplx d_rho = -(2.0 - delta) * mom.value;
  const cplx d_ss = mom.value / 4.0;
  return std::abs(d_rho + 8.0 / (1.0 + delta) * d_ss);
}

double domination_bound(const RhoMatrix& rho, const std::vector<cplx>& s) {
  check_params({rho, s, MultiVariant::Theta}, "domination_bound");
  double out = 1.0;
  for (int i = 0; i < rho.dim(); ++i) out *= xi(rho(i, i).real(), s[i].real()).value.real();
  return out;
}

XiValue fubini_convolution(cplx r11, cplx r22, cplx r12, cplx s1, cplx s2, const QuadSpec& spec) {
  const RhoMatrix rho = RhoMatrix::two(r11, r12, r22);
  rho.require_convergence("fubini_convolution");
  const cplx q = r11 + r22 - 2.0 * r12;
  const cplx slope_arg = 2.0 * (r22 - r12);
  const double decay = (rho.det() / r22).real();
  if (!(decay > 0.0)) fail(ErrorCode::Domain, "fubini_convolution: outer integral does not decay");
  // M_{r22}(a) grows like |e^{a^2/4 r22}|; the combined Gaussian is det/r22.
  const double slope = std::abs((s1 - s2).real()) / 2.0 +
                       std::abs(s2.real() / 2.0 * slope_arg.real() / (2.0 * r22.real())) + 1.0;
  QuadSpec outer = spec;
  const double radius = gaussian_truncation_radius(decay, slope, spec.abs_tol);
  if (!(outer.trunc_radius[0] > 0.0)) outer.trunc_radius[0] = radius;
  const double x = outer.trunc_radius[0];
  const double omega = std::abs((s1 - s2).imag()) / 2.0 + 2.0 * std::abs(q.imag()) * x +
                       std::abs(slope_arg) * (std::abs(s2) / 2.0 + std::abs(slope_arg) * x) /
                           (2.0 * std::abs(r22));
  outer.max_step = std::min(outer.max_step, oscillation_step(omega));
  QuadSpec inner = spec;
  inner.trunc_radius = {0.0, 0.0, 0.0};
  MellinEvaluator ev(ThetaOperator::plain(), r22, 0,
                     std::abs(s2.real()) / 2.0 + std::abs(slope_arg.real()) * x, inner);
  long long evals = 0;
  double inner_err = 0.0;
  const IntegralResult r = integrate_log_axis(
      [&](double t) {
        const XiValue m = ev(s2 / 2.0 + slope_arg * t);
        evals += m.evaluations;
        const cplx w = std::exp(-q * t * t + (s1 - s2) * t / 2.0);
        inner_err = std::max(inner_err, m.quad_error * std::abs(w));
        return m.value * w;
      },
      outer);
  return {r.value, r.error_estimate + 2.0 * x * inner_err, r.evaluations + evals, false};
}

XiValue fubini_closed(cplx r11, cplx r22, cplx r12, cplx s1, cplx s2, const QuadSpec& spec) {
  const RhoMatrix rho = RhoMatrix::two(r11, r12, r22);
  rho.require_convergence("fubini_closed");
  const cplx q = r11 + r22 - 2.0 * r12;
  const cplx f = std::sqrt(kPi / q) * std::exp((s1 - s2) * (s1 - s2) / (16.0 * q));
  XiValue v = mellin({ThetaOperator::plain(), 0, rho.det() / q,
                      (s1 * r22 + s2 * r11 - (s1 + s2) * r12) / (2.0 * q)},
                     spec);
  v.value *= f;
  v.quad_error *= std::abs(f);
  return v;
}

XiValue mean_value_convolution(double gamma, double rho, cplx s, const QuadSpec& spec) {
  if (!(rho > 0.0) || !(gamma > rho))
    fail(ErrorCode::Domain, "mean_value_convolution: need gamma > rho > 0");
  const double width = gamma - rho;
  const double decay = rho / (4.0 * gamma * width);
  QuadSpec outer = spec;
  const double slope = std::abs(s.real()) / (2.0 * width) + 1.0;
  if (!(outer.trunc_radius[0] > 0.0))
    outer.trunc_radius[0] = gaussian_truncation_radius(decay, slope, spec.abs_tol);
  const double x = outer.trunc_radius[0];
  outer.max_step = std::min(outer.max_step, oscillation_step(std::abs(s.imag()) / (2.0 * width)));
  QuadSpec inner = spec;
  inner.trunc_radius = {0.0, 0.0, 0.0};
  MellinEvaluator ev(ThetaOperator::plain(), gamma, 0, x + std::abs(s.real()), inner);
  long long evals = 0;
  double inner_err = 0.0;
  const double norm = 1.0 / std::sqrt(4.0 * kPi * width);
  const IntegralResult r = integrate_log_axis(
      [&](double q) {
        const XiValue m = ev(q);
        evals += m.evaluations;
        const cplx w = norm * std::exp(-(q - s) * (q - s) / (4.0 * width));
        inner_err = std::max(inner_err, m.quad_error * std::abs(w));
        return m.value * w;
      },
      outer);
  return {r.value, r.error_estimate + 2.0 * x * inner_err, r.evaluations + evals, false};
}

}  // namespace dxi
