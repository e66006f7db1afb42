#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dxi/xi_multi.hpp"
#include "oracles.hpp"

using namespace dxi;

namespace {

// Nested trapezoid over both log axes with oracle kernel values.
cplx oracle_xi2(oracle::Kernel k, const RhoMatrix& r, cplx s1, cplx s2) {
  const double h = 1.0 / 32, X = 14;
  std::vector<double> xs;
  std::vector<cplx> g1, g2;
  for (double x = -X; x <= X; x += h) {
    const double kv = double(oracle::kernel(k, std::exp(x)));
    xs.push_back(x);
    g1.push_back(kv * std::exp(s1 * x / 2.0 - r(0, 0) * x * x));
    g2.push_back(kv * std::exp(s2 * x / 2.0 - r(1, 1) * x * x));
  }
  cplx sum = 0;
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < xs.size(); ++j) sum += g1[i] * g2[j] * std::exp(-2.0 * r(0, 1) * xs[i] * xs[j]);
  return sum * h * h;
}

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("d = 2 against the nested trapezoid oracle") {
  const RhoMatrix r = RhoMatrix::two(cplx(1, 0.1), cplx(0.25, -0.05), cplx(0.8, 0));
  const cplx s1(0.5, 1), s2(1.5, -0.5);
  CHECK(close(xi_d({r, {s1, s2}, MultiVariant::Theta}).value, oracle_xi2(oracle::Kernel::Psi, r, s1, s2), 1e-8));
  CHECK(close(xi_d({r, {s1, s2}, MultiVariant::Jensen}).value, oracle_xi2(oracle::Kernel::Delta4, r, s1, s2),
              1e-8));
}

TEST_CASE("factorisation for diagonal rho") {
  const XiValue v = xi_d({RhoMatrix::diagonal({0.5, 1.0}), {1.0, 2.0}});
  CHECK(close(v.value, xi(0.5, 1.0).value * xi(1.0, 2.0).value, 1e-8));
  const XiValue w = xi_d({RhoMatrix::two(0.7, 0.0, 1.3), {cplx(0.2, 1), cplx(2, -1)}});
  CHECK(close(w.value, xi(0.7, cplx(0.2, 1)).value * xi(1.3, cplx(2, -1)).value, 1e-8));
  QuadSpec sp = QuadSpec::for_dimension(3);
  const XiValue u = xi_d({RhoMatrix::diagonal({0.6, 1.0, 1.5}), {0.5, 1.0, cplx(0, 1)}}, sp);
  CHECK(close(u.value, xi(0.6, 0.5).value * xi(1.0, 1.0).value * xi(1.5, cplx(0, 1)).value, 1e-7));
}

TEST_CASE("relabelling symmetry and domination") {
  const RhoMatrix r = RhoMatrix::two(1.0, cplx(0.2, 0.1), 1.0);
  const cplx a(0.3, 0.4), b(1.2, -0.8);
  CHECK(close(xi_d({r, {a, b}}).value, xi_d({r, {b, a}}).value, 1e-9));
  const RhoMatrix ri = RhoMatrix::two(1.0, cplx(0, 0.2), 0.8);
  const std::vector<cplx> s{cplx(0.5, 2), cplx(1, -1)};
  const double bound = domination_bound(ri, s);
  CHECK(std::abs(bound - (xi(1.0, 0.5).value * xi(0.8, 1.0).value).real()) < 1e-10);
  CHECK(std::abs(xi_d({ri, s}).value) <= bound);
}

TEST_CASE("Jensen flip symmetry") {
  CHECK(jensen_flip_residual(RhoMatrix::scalar(1.0), {0.3}, 0) < 1e-9);
  CHECK(jensen_flip_residual(RhoMatrix::two(1.0, 0.2, 1.0), {0.7, 1.1}, 0) < 1e-8);
  CHECK(jensen_flip_residual(RhoMatrix::two(1.0, 0.2, 1.0), {0.7, 1.1}, 1) < 1e-8);
  CHECK(jensen_flip_residual(RhoMatrix::two(cplx(0.9, 0.1), cplx(-0.15, 0.05), 1.2), {cplx(0.2, 1), 2.0}, 1) <
        1e-8);
  // Without flipping rho the symmetry is lost.
  const RhoMatrix r = RhoMatrix::two(1.0, 0.2, 1.0);
  const cplx flipped_s = xi_d({r, {1.0 - 0.7, 1.1}, MultiVariant::Jensen}).value;
  CHECK(std::abs(xi_d({r, {0.7, 1.1}, MultiVariant::Jensen}).value - flipped_s) > 1e-4);
  const cplx rho12(0.1, 0.2);
  const RhoMatrix rc = RhoMatrix::two(cplx(1, 0.3), rho12, cplx(1, -0.2));
  const std::vector<cplx> s{cplx(0.3, 0.5), cplx(0.9, -1)};
  const cplx v = xi_d({rc, s, MultiVariant::Jensen}).value;
  const cplx w = xi_d({rc.conj(), {std::conj(s[0]), std::conj(s[1])}, MultiVariant::Jensen}).value;
  CHECK(close(w, std::conj(v), 1e-9));
}

TEST_CASE("multidimensional heat equation") {
  const RhoMatrix r = RhoMatrix::two(1.0, 0.2, 0.9);
  const std::vector<cplx> s{cplx(0.5, 1), 1.0};
  const QuadSpec sp = QuadSpec::for_dimension(2);
  CHECK(heat_residual_multi(r, s, 0, 0, sp) < 1e-12);
  CHECK(heat_residual_multi(r, s, 1, 1, sp) < 1e-12);
  CHECK(heat_residual_multi(r, s, 0, 1, sp) < 1e-12);

  const double h = 1e-4;
  RhoMatrix up = r, dn = r;
  up.set(0, 1, r(0, 1) + h);
  dn.set(0, 1, r(0, 1) - h);
  const cplx fd = (xi_d({up, s}, sp).value - xi_d({dn, s}, sp).value) / (2 * h);
  CHECK(std::abs(fd - xi_d_drho({r, s}, 0, 1, sp).value) < 1e-6);
  RhoMatrix up2 = r, dn2 = r;
  up2.set(1, 1, r(1, 1) + h);
  dn2.set(1, 1, r(1, 1) - h);
  const cplx fd2 = (xi_d({up2, s}, sp).value - xi_d({dn2, s}, sp).value) / (2 * h);
  CHECK(std::abs(fd2 - xi_d_drho({r, s}, 1, 1, sp).value) < 1e-6);
}

TEST_CASE("Fubini form and mean value property") {
  const XiValue a = fubini_convolution(1.0, 0.8, 0.2, cplx(0.5, 1), 1.5);
  const XiValue b = fubini_closed(1.0, 0.8, 0.2, cplx(0.5, 1), 1.5);
  CHECK(close(a.value, b.value, 1e-8));
  // M[Psi e^{-rho ln^2}](s) = Xi_rho(2s)
  CHECK(close(mean_value_convolution(1.0, 0.5, 0.4).value, xi(0.5, 0.8).value, 1e-7));
  CHECK(close(mean_value_convolution(0.8, 0.5, cplx(0.1, 0.5)).value, xi(0.5, cplx(0.2, 1)).value, 1e-7));
  CHECK_THROWS_AS(mean_value_convolution(0.5, 1.0, 0.4), Error);
}

TEST_CASE("truncation radii cover the integrand") {
  const RhoMatrix r = RhoMatrix::two(1.0, 0.4, 1.0);
  const auto X = multi_truncation_radii(r, {cplx(2, 1), -1.0}, 1e-12);
  CHECK(X[0] > 0);
  CHECK(X[1] > 0);
  CHECK(X[0] >= X[1]);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(xi_d({RhoMatrix::two(1.0, 2.0, 1.0), {0.0, 0.0}}), Error);
  CHECK_THROWS_AS(xi_d({RhoMatrix::two(1.0, 0.1, 1.0), {0.0}}), Error);
  CHECK_THROWS_AS(heat_residual_multi(RhoMatrix::two(1.0, 0.1, 1.0), {0.0, 0.0}, 0, 2), Error);
}
