#pragma once
// Reference implementations used as test oracles.  They deliberately share
// no code with the library: plain series summation in long double, the
// textbook t -> 1/t formulas, and a fixed-step trapezoid on the log axis.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

using ld = long double;
using cld = std::complex<long double>;
constexpr ld kPi = std::numbers::pi_v<long double>;

// sum_{n>=1} (-pi n^2)^k e^{-pi n^2 t}, summed until terms vanish.
inline ld psi_series(ld t, int k) {
  ld sum = 0;
  for (int n = 1; n < 100000; ++n) {
    const ld a = kPi * n * n;
    const ld term = std::pow(-a, k) * std::exp(-a * t);
    sum += term;
    if (a * t > 80 && std::fabs(term) < 1e-40L) break;
  }
  return sum;
}

// Psi, H_4 Psi = Psi + 4t Psi', Delta_4 Psi = 8(2t^2 Psi'' + 3t Psi'),
// with the classical reflections below t = 0.3.
enum class Kernel { Psi, H4, Delta4 };

inline ld kernel_direct(Kernel k, ld t) {
  const ld p0 = psi_series(t, 0), p1 = psi_series(t, 1), p2 = psi_series(t, 2);
  switch (k) {
    case Kernel::Psi: return p0;
    case Kernel::H4: return p0 + 4 * t * p1;
    case Kernel::Delta4: return 8 * (2 * t * t * p2 + 3 * t * p1);
  }
  return 0;
}

inline ld kernel(Kernel k, ld t) {
  if (t >= 0.3L) return kernel_direct(k, t);
  const ld r = 1 / std::sqrt(t);
  switch (k) {
    case Kernel::Psi: return r * kernel_direct(k, 1 / t) + (r - 1) / 2;
    case Kernel::H4: return -r * kernel_direct(k, 1 / t) - (r + 1) / 2;
    case Kernel::Delta4: return r * kernel_direct(k, 1 / t);
  }
  return 0;
}

// int dx K(e^x) x^m e^{a x - rho x^2} by a fixed-step trapezoid.
inline std::complex<double> mellin(Kernel k, std::complex<double> rho, std::complex<double> a,
                                   int m = 0, ld h = 1.0L / 128) {
  const cld r(rho.real(), rho.imag()), aa(a.real(), a.imag());
  const ld X = std::sqrt(60.0L / rho.real()) + std::fabs(a.real()) / rho.real() + 2;
  cld sum = 0;
  for (ld x = -X; x <= X; x += h)
    sum += kernel(k, std::exp(x)) * std::pow(x, m) * std::exp(aa * x - r * x * x);
  sum *= h;
  return {double(sum.real()), double(sum.imag())};
}

inline std::complex<double> xi(std::complex<double> rho, std::complex<double> s) {
  return mellin(Kernel::Psi, rho, s / 2.0);
}

// sqrt(pi/rho) e^{a^2/4rho}
inline std::complex<double> gauss(std::complex<double> rho, std::complex<double> a) {
  return std::sqrt(std::numbers::pi / rho) * std::exp(a * a / (4.0 * rho));
}

// Composite Simpson on the segment [z, s] with n (even) panels.
inline std::complex<double> segment(const std::function<std::complex<double>(std::complex<double>)>& f,
                                    std::complex<double> z, std::complex<double> s, int n = 400) {
  const std::complex<double> h = (s - z) / double(n);
  std::complex<double> sum = f(z) + f(s);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(z + double(i) * h);
  return sum * h / 3.0;
}

}  // namespace oracle
