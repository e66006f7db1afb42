#pragma once

#include <array>
#include <functional>
#include <vector>

#include "dxi/error.hpp"

namespace dxi {

struct QuadSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  // Half-width X of the box [-X, X] per axis (log coordinates).  Zero means
  // "let the caller pick from the Gaussian envelope".
  std::array<double, 3> trunc_radius{0.0, 0.0, 0.0};
  // Budget: adaptive segment rules stop at max_panels subintervals; the
  // trapezoid ladders stop at max_panels * panel_order nodes per axis.
  int max_panels = 4096;
  int panel_order = 15;  // Kronrod nodes per panel (G7/K15)
  // A trapezoid level is only accepted once its step is at most this.
  double max_step = 0.25;

  static QuadSpec for_dimension(int d);
  long long max_nodes_per_axis() const {
    return static_cast<long long>(max_panels) * panel_order;
  }
};

struct IntegralResult {
  cplx value{0.0};
  double error_estimate = 0.0;
  long long evaluations = 0;
};

// Half-width X with -rho X^2 + slope X + m ln X <= -(ln(1/abs_tol) + 5):
// beyond X an integrand bounded by |x|^m e^{slope|x| - rho x^2} is below tolerance.
double gaussian_truncation_radius(double rho_eff, double slope, double abs_tol,
                                  int log_power = 0);

// Largest oscillation-safe trapezoid step for a factor e^{i omega x}.
double oscillation_step(double omega);

// int_{-X}^{X} f(x) dx, X = spec.trunc_radius[0].
IntegralResult integrate_log_axis(const std::function<cplx(double)>& f, const QuadSpec& spec);

// Same, but on a user-controlled node ladder: f receives the whole node
// array of a level and returns the weighted sum h * sum f(x_j) contribution
// of those nodes (used by cached Mellin evaluators).
struct TrapezoidLevel {
  double x0;    // first node
  double step;  // node spacing within this batch
  long long count;
};
IntegralResult trapezoid_ladder(double radius,
                                const std::function<cplx(const TrapezoidLevel&)>& batch_sum,
                                const QuadSpec& spec);

// int_z^s f(t) dt along the straight segment.
IntegralResult integrate_segment(const std::function<cplx(cplx)>& f, cplx z, cplx s,
                                 const QuadSpec& spec);

// int over [-X_1,X_1] x ... x [-X_d,X_d] of f(x).
IntegralResult tensor_integrate(const std::function<cplx(const double*)>& f, int d,
                                const QuadSpec& spec);

// sum_j v[j] exp(kappa (x0 + j h)) by a re-anchored geometric recurrence.
cplx exp_weighted_sum(const std::vector<cplx>& v, double x0, double h, cplx kappa);

// Fast path for integrands prod_i g_i(x_i) * exp(-2 sum_{i<j} c_ij x_i x_j).
// coupling[i][j] (i < j) holds c_ij; the diagonal is ignored.
IntegralResult coupled_integrate(const std::vector<std::function<cplx(double)>>& axis,
                                 const std::array<std::array<cplx, 3>, 3>& coupling,
                                 const QuadSpec& spec);

}  // namespace dxi
