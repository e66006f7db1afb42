#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dxi/quadrature.hpp"
#include "oracles.hpp"

using namespace dxi;
using std::numbers::pi;

namespace {

QuadSpec with_radius(double X, int d = 1) {
  QuadSpec s = QuadSpec::for_dimension(d);
  s.trunc_radius = {X, X, X};
  return s;
}

}  // namespace

TEST_CASE("log-axis Gaussians") {
  const QuadSpec sp = with_radius(gaussian_truncation_radius(1.0, 0.0, 1e-12));
  CHECK(std::abs(integrate_log_axis([](double x) { return cplx(std::exp(-x * x)); }, sp).value -
                 std::sqrt(pi)) < 1e-12);

  const QuadSpec sp2 = with_radius(gaussian_truncation_radius(1.0, 1.0, 1e-12));
  const cplx v = integrate_log_axis([](double x) { return cplx(std::exp(-x * x + x)); }, sp2).value;
  CHECK(std::abs(v - std::sqrt(pi) * std::exp(0.25)) < 1e-10 * std::abs(v));
  const QuadSpec sp3 = with_radius(gaussian_truncation_radius(1.0, 2.0, 1e-12));
  const cplx w = integrate_log_axis([](double x) { return cplx(std::exp(-x * x + 2 * x)); }, sp3).value;
  CHECK(std::abs(w - std::sqrt(pi) * std::exp(1.0)) < 1e-10 * std::abs(w));

  const cplx odd = integrate_log_axis([](double x) { return cplx(x * std::exp(-x * x)); }, sp).value;
  CHECK(std::abs(odd) <= sp.abs_tol);
}

TEST_CASE("truncation radius bounds the Gaussian tail") {
  for (double rho : {0.1, 0.5, 2.0})
    for (double slope : {0.0, 3.0}) {
      const double X = gaussian_truncation_radius(rho, slope, 1e-12);
      CHECK(-rho * X * X + slope * X <= std::log(1e-12) - 5 + 1e-9);
    }
  CHECK_THROWS_AS(gaussian_truncation_radius(0.0, 0.0, 1e-12), Error);
}

TEST_CASE("complex-coefficient Gauss identity against the trapezoid oracle") {
  const cplx rho(0.7, 0.2), a(0.4, 1.5);
  const QuadSpec sp = with_radius(gaussian_truncation_radius(rho.real(), std::abs(a), 1e-13));
  const cplx v =
      integrate_log_axis([&](double x) { return std::exp(a * x - rho * x * x); }, sp).value;
  CHECK(std::abs(v - oracle::gauss(rho, a)) < 1e-10 * std::abs(v));
}

TEST_CASE("linearity") {
  const QuadSpec sp = with_radius(12.0);
  auto f = [](double x) { return cplx(std::exp(-x * x), 0.3 * x); } ;
  auto ff = [&](double x) { return f(x) * std::exp(-0.1 * x * x); };
  auto g = [](double x) { return std::exp(cplx(-0.5, 0.2) * x * x); };
  const cplx a(2.0, -1.0), b(0.5, 0.5);
  const cplx lhs =
      integrate_log_axis([&](double x) { return a * ff(x) + b * g(x); }, sp).value;
  const cplx rhs = a * integrate_log_axis(ff, sp).value + b * integrate_log_axis(g, sp).value;
  CHECK(std::abs(lhs - rhs) < 2 * sp.abs_tol * (1 + std::abs(a) + std::abs(b)));
}

TEST_CASE("segment integrals") {
  const QuadSpec sp;
  CHECK(std::abs(integrate_segment([](cplx) { return cplx(1.0); }, 0.0, cplx(1, 1), sp).value -
                 cplx(1, 1)) < 1e-15);
  CHECK(std::abs(integrate_segment([](cplx t) { return std::cosh(t - 0.5); }, 0.5, 0.5, sp).value) ==
        0.0);

  auto f = [](cplx t) { return std::exp(-t * t) * std::sin(3.0 * t); };
  const cplx z(0.2, -0.4), y(1.1, 0.7), s(-0.3, 1.9);
  const cplx zs = integrate_segment(f, z, s, sp).value;
  CHECK(std::abs(zs + integrate_segment(f, s, z, sp).value) < 1e-14);
  CHECK(std::abs(integrate_segment(f, z, y, sp).value + integrate_segment(f, y, s, sp).value - zs) <
        3 * sp.abs_tol);
  CHECK(std::abs(zs - oracle::segment(f, z, s, 4000)) < 1e-10 * std::abs(zs));
}

TEST_CASE("segment: sinh-cosh example at rho = 1, s = 3/2") {
  const double c = 16.0;
  const cplx s = 1.5;
  auto f = [&](cplx t) { return std::sinh((s - t) / c) * std::cosh((0.5 - t) / c); };
  const cplx v = integrate_segment(f, 0.5, s, QuadSpec{}).value;
  // int_{1/2}^s sinh((s-t)/c) cosh((1/2-t)/c) dt = ((s - 1/2)/2) sinh((s - 1/2)/c)
  CHECK(std::abs(v - (s - 0.5) / 2.0 * std::sinh((s - 0.5) / c)) < 1e-13);
}

TEST_CASE("tensor integrals") {
  const QuadSpec sp2 = with_radius(7.0, 2);
  CHECK(std::abs(tensor_integrate([](const double* x) { return cplx(std::exp(-x[0] * x[0] - x[1] * x[1])); },
                                  2, sp2)
                     .value -
                 pi) < 1e-10);

  // e^{-x.rho x + s.x/2} against sqrt(pi^2/det) e^{s.rho^{-1}s/16}
  const double r11 = 1, r12 = 0.3, r22 = 1, s1 = 1, s2 = 2;
  const double det = r11 * r22 - r12 * r12;
  const QuadSpec sp = with_radius(9.0, 2);
  const cplx v = tensor_integrate(
                     [&](const double* x) {
                       return cplx(std::exp(-(r11 * x[0] * x[0] + 2 * r12 * x[0] * x[1] + r22 * x[1] * x[1]) +
                                            (s1 * x[0] + s2 * x[1]) / 2));
                     },
                     2, sp)
                     .value;
  const double q = (r22 * s1 * s1 - 2 * r12 * s1 * s2 + r11 * s2 * s2) / det;
  CHECK(std::abs(v - pi / std::sqrt(det) * std::exp(q / 16)) < 1e-8);

  const QuadSpec sp3 = with_radius(6.5, 3);
  const cplx v3 = tensor_integrate(
      [](const double* x) { return cplx(std::exp(-x[0] * x[0] - x[1] * x[1] - x[2] * x[2])); }, 3, sp3).value;
  CHECK(std::abs(v3 - std::pow(pi, 1.5)) < 1e-8);
}

TEST_CASE("refinement: tighter tolerances stay within the coarse error estimate") {
  QuadSpec coarse = with_radius(10.0), fine = coarse;
  coarse.abs_tol = 1e-8;
  coarse.rel_tol = 1e-8;
  fine.abs_tol = 0.5e-8;
  fine.rel_tol = 0.5e-8;
  auto f = [](double x) { return std::exp(cplx(-0.3, 0.4) * x * x + cplx(0.2, 2.0) * x); };
  const IntegralResult a = integrate_log_axis(f, coarse), b = integrate_log_axis(f, fine);
  CHECK(std::abs(a.value - b.value) <= std::max(a.error_estimate, 1e-15));
  auto g = [](cplx t) { return std::exp(cplx(0, 5) * t) / (1.0 + t * t); };
  QuadSpec sc, sf;
  sc.abs_tol = sc.rel_tol = 1e-6;
  sf.abs_tol = sf.rel_tol = 0.5e-6;
  const IntegralResult c = integrate_segment(g, -2.0, cplx(3, 0.5), sc);
  const IntegralResult d = integrate_segment(g, -2.0, cplx(3, 0.5), sf);
  CHECK(std::abs(c.value - d.value) <= std::max(c.error_estimate, 1e-15));
}

TEST_CASE("non-convergence carries the best estimate") {
  QuadSpec sp;
  sp.max_panels = 2;
  sp.abs_tol = sp.rel_tol = 1e-15;
  try {
    integrate_segment([](cplx t) { return std::exp(cplx(0, 200) * t); }, 0.0, 10.0, sp);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(std::isfinite(e.error_estimate()));
  }
}

TEST_CASE("domain errors") {
  QuadSpec bad;
  bad.abs_tol = -1;
  auto one = [](cplx) { return cplx(1.0); };
  CHECK_THROWS_AS(integrate_segment(one, 0.0, 1.0, bad), Error);
  CHECK_THROWS_AS(tensor_integrate([](const double*) { return cplx(1.0); }, 4, with_radius(1.0)), Error);
  CHECK_THROWS_AS(tensor_integrate([](const double*) { return cplx(1.0); }, 2, QuadSpec{}), Error);
}

TEST_CASE("exp_weighted_sum matches direct summation") {
  std::vector<cplx> v;
  for (int j = 0; j < 500; ++j) v.push_back(cplx(std::cos(j * 0.1), std::sin(j * 0.37)));
  const double x0 = -5, h = 0.02;
  const cplx kappa(0.8, 3.1);
  cplx ref = 0;
  for (int j = 0; j < 500; ++j) ref += v[j] * std::exp(kappa * (x0 + j * h));
  CHECK(std::abs(exp_weighted_sum(v, x0, h, kappa) - ref) < 1e-12 * std::abs(ref));
}
