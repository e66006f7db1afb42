#include <cmath>

#include "doctest.h"
#include "dxi/theta.hpp"
#include "oracles.hpp"

using namespace dxi;

TEST_CASE("psi matches direct summation") {
  // e^{-pi} + e^{-4 pi} + ...
  CHECK(psi(1.0) == doctest::Approx(0.043217405606654).epsilon(1e-13));
  for (double t : {0.05, 0.3, 1.0, 2.5, 7.0})
    for (int k = 0; k <= 3; ++k) {
      const double ref = double(oracle::kernel(oracle::Kernel::Psi, t));
      if (k == 0) CHECK(std::abs(psi(t, 0) - ref) < 1e-14 * (1 + std::abs(ref)));
      if (t >= 0.3) {
        const double refk = double(oracle::psi_series(t, k));
        CHECK(std::abs(psi(t, k) - refk) <= 1e-13 * (1 + std::abs(refk)));
      }
    }
}

TEST_CASE("psi Poisson identity") {
  const double r = 1 / std::sqrt(2.0);
  CHECK(std::abs(psi(2.0) - (r * psi(0.5) + (r - 1) / 2)) < 1e-12);
  for (int i = 0; i < 100; ++i) {
    const double t = 0.1 + (10.0 - 0.1) * i / 99.0;
    CHECK(functional_residual(ReflectionKind::Psi, t) < 1e-12 * (1 + 1 / std::sqrt(t)));
  }
  CHECK(functional_residual(ReflectionKind::Psi, 1.0) < 1e-16);
}

TEST_CASE("psi is positive and strictly decreasing") {
  double prev = psi(0.01);
  CHECK(prev > 0);
  for (int i = 1; i <= 200; ++i) {
    const double t = 0.01 * std::pow(1.04, i);
    const double v = psi(t);
    CHECK(v > 0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(psi(40.0) < 1e-50);
}

TEST_CASE("truncation certificate: a tighter eps changes psi by less than eps") {
  const ThetaTruncation base{}, tight{1e-30};
  for (double t : {0.2, 0.5, 1.0, 3.0})
    for (int k = 0; k <= 3; ++k) {
      CHECK(std::abs(psi(t, k, base) - psi(t, k, tight)) <= base.eps * 4);
      const int n = base.terms(t, k);
      CHECK(n >= 1);
      // The omitted tail really is below eps.
      long double tail = 0;
      for (int m = n + 1; m <= 2 * n + 20; ++m) {
        const long double a = oracle::kPi * m * m;
        tail += std::pow(a, k) * std::exp(-a * t);
      }
      CHECK(double(tail) <= base.eps);
    }
}

TEST_CASE("operators match their t-derivative forms") {
  for (double t : {0.05, 0.15, 1.0, 2.0, 4.0}) {
    const double d4 = apply_theta_op(ThetaOperator::delta4(), t).real();
    const double h4 = apply_theta_op(ThetaOperator::h(4.0), t).real();
    CHECK(std::abs(d4 - double(oracle::kernel(oracle::Kernel::Delta4, t))) < 1e-12 * (1 + std::abs(d4)));
    CHECK(std::abs(h4 - double(oracle::kernel(oracle::Kernel::H4, t))) < 1e-12 * (1 + std::abs(h4)));
    if (t >= 0.2) {
      CHECK(std::abs(d4 - 8 * (2 * t * t * psi(t, 2) + 3 * t * psi(t, 1))) < 1e-13);
      CHECK(std::abs(h4 - (psi(t) + 4 * t * psi(t, 1))) < 1e-14);
    }
  }
  CHECK(std::abs(apply_theta_op(ThetaOperator::delta4(), 1.0).real() -
                 8 * (2 * psi(1.0, 2) + 3 * psi(1.0, 1))) < 1e-13);
}

TEST_CASE("reflection identities of H4 and Delta4") {
  const double t = 3.0, r = 1 / std::sqrt(t);
  const cplx h = apply_theta_op(ThetaOperator::h(4.0), t);
  const cplx hr = apply_theta_op(ThetaOperator::h(4.0), 1 / t);
  CHECK(std::abs(h + r * hr + (r + 1) / 2) < 1e-12);
  const double u = 2.0;
  CHECK(std::abs(apply_theta_op(ThetaOperator::delta4(), u) -
                 apply_theta_op(ThetaOperator::delta4(), 1 / u) / std::sqrt(u)) < 1e-12);
  CHECK(functional_residual(ReflectionKind::Delta4, 5.0) < 1e-12);
  CHECK(functional_residual(ReflectionKind::H4, 0.7) < 1e-12);
  CHECK(functional_residual(ReflectionKind::DeltaAlpha, 2.0, 2.0) < 1e-12);
  CHECK(functional_residual(ReflectionKind::DeltaAlpha, 0.4, cplx(3.0, 0.5)) < 1e-12);
}

TEST_CASE("Delta_alpha oracle: H_a^2 - id on the series") {
  // H_2 = 1 + 2 theta, so H_2^2 - id = 4 theta + 4 theta^2 = 8 t d/dt + 4 t^2 d^2/dt^2
  for (double t : {0.5, 1.0, 2.0}) {
    const double ref = double(8 * t * oracle::psi_series(t, 1) + 4 * t * t * oracle::psi_series(t, 2));
    CHECK(std::abs(apply_theta_op(ThetaOperator::delta_alpha(2.0), t).real() - ref) < 1e-13);
  }
}

TEST_CASE("Delta4 H4 expansion: composition carries 7.5 t Psi', a 7 t Psi' term is off by 8 t Psi'") {
  for (double t : {0.6, 1.0, 1.7}) {
    const double p1 = psi(t, 1), p2 = psi(t, 2), p3 = psi(t, 3);
    const double v = apply_theta_op(ThetaOperator::delta4_h4(), t).real();
    const double composed = 16 * (4 * t * t * t * p3 + 15 * t * t * p2 + 7.5 * t * p1);
    const double printed = 16 * (4 * t * t * t * p3 + 15 * t * t * p2 + 7 * t * p1);
    CHECK(std::abs(v - composed) < 1e-12);
    CHECK(std::abs((v - printed) - 8 * t * p1) < 1e-12);
  }
}

TEST_CASE("Delta4 powers compose termwise") {
  const ThetaOperator d = ThetaOperator::delta4();
  for (int n = 1; n <= 3; ++n) {
    ThetaOperator composed = d;
    for (int i = 1; i < n; ++i) composed = composed * d;
    for (double t : {0.1, 0.9, 2.0})
      CHECK(std::abs(apply_theta_op(ThetaOperator::delta4_power(n), t) -
                     apply_theta_op(composed, t)) < 1e-10 * (1 + std::abs(apply_theta_op(composed, t))));
  }
  // Self-reciprocity survives powers: (Delta4^2 Psi)(t) = t^{-1/2}(Delta4^2 Psi)(1/t).
  const ThetaOperator d2 = ThetaOperator::delta4_power(2);
  CHECK(std::abs(apply_theta_op(d2, 2.0) - apply_theta_op(d2, 0.5) / std::sqrt(2.0)) < 1e-11);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(psi(0.0), Error);
  CHECK_THROWS_AS(psi(-1.0), Error);
  try {
    psi(1.0, 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedOrder);
  }
  try {
    ThetaOperator::delta4_power(4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedOrder);
  }
  try {
    apply_theta_op(ThetaOperator::plain(), 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}
