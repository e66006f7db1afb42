#include "dxi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace dxi {

namespace {

// Gauss-Kronrod 7/15 (QUADPACK tables).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

constexpr double kStartStep = 0.5;

bool accepted(double err, cplx value, const QuadSpec& spec) {
  return err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
}

void check_spec(const QuadSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
    fail(ErrorCode::Domain, "quadrature tolerances must be positive");
  if (spec.max_panels <= 0) fail(ErrorCode::Domain, "max_panels must be positive");
  if (spec.panel_order != 15)
    fail(ErrorCode::Domain, "only the 15-point Kronrod panel is implemented");
}

long long start_intervals(double radius) {
  return std::max<long long>(4, static_cast<long long>(std::ceil(2.0 * radius / kStartStep)));
}

struct Panel {
  cplx a, b;  // endpoints in the parameter
  cplx value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const std::function<cplx(cplx)>& f, cplx a, cplx b) {
  const cplx mid = 0.5 * (a + b);
  const cplx half = 0.5 * (b - a);
  const cplx fc = f(mid);
  cplx kron = fc * kWgk[7];
  cplx gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const cplx dx = half * kXgk[j];
    const cplx pair = f(mid - dx) + f(mid + dx);
    kron += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {a, b, kron * half, std::abs((kron - gauss) * half)};
}

}  // namespace

QuadSpec QuadSpec::for_dimension(int d) {
  QuadSpec q;
  if (d >= 3) {
    q.abs_tol = 1e-9;
    q.rel_tol = 1e-7;
  }
  return q;
}

double gaussian_truncation_radius(double rho, double slope, double abs_tol, int m) {
  if (!(rho > 0.0)) fail(ErrorCode::Domain, "truncation needs a positive Gaussian coefficient");
  const double L0 = std::log(1.0 / std::min(abs_tol, 1e-3)) + 5.0;
  slope = std::abs(slope);
  double X = 1.0;
  for (int it = 0; it < 8; ++it) {
    const double L = L0 + m * std::log(std::max(X, 1.0));
    X = (slope + std::sqrt(slope * slope + 4.0 * rho * L)) / (2.0 * rho);
  }
  return std::max(X, 1.0);
}

double oscillation_step(double omega) {
  return std::min(0.25, 2.0 * std::numbers::pi / (std::abs(omega) + 26.0));
}

IntegralResult trapezoid_ladder(double radius,
                                const std::function<cplx(const TrapezoidLevel&)>& batch_sum,
                                const QuadSpec& spec) {
  check_spec(spec);
  if (!(radius > 0.0)) fail(ErrorCode::Domain, "trapezoid ladder needs a positive radius");
  long long n = start_intervals(radius);
  double h = 2.0 * radius / double(n);
  IntegralResult r;
  r.value = h * batch_sum({-radius, h, n + 1});
  r.evaluations = n + 1;
  double err = 0.0;
  for (;;) {
    if (2 * n > spec.max_nodes_per_axis())
      throw NonConvergenceError("trapezoid ladder exceeded its node budget", r.value, err);
    // New nodes sit at the odd multiples of the halved step.
    h *= 0.5;
    const cplx fresh = batch_sum({-radius + h, 2.0 * h, n});
    r.evaluations += n;
    n *= 2;
    const cplx next = 0.5 * r.value + h * fresh;
    err = std::abs(next - r.value);
    r.value = next;
    r.error_estimate = err;
    if (h <= spec.max_step && accepted(err, next, spec)) return r;
  }
}

IntegralResult integrate_log_axis(const std::function<cplx(double)>& f, const QuadSpec& spec) {
  auto batch = [&](const TrapezoidLevel& lv) {
    cplx acc = 0.0;
    for (long long j = 0; j < lv.count; ++j) acc += f(lv.x0 + double(j) * lv.step);
    return acc;
  };
  return trapezoid_ladder(spec.trunc_radius[0], batch, spec);
}

IntegralResult integrate_segment(const std::function<cplx(cplx)>& f, cplx z, cplx s,
                                 const QuadSpec& spec) {
  check_spec(spec);
  IntegralResult r;
  if (z == s) return r;
  std::priority_queue<Panel> heap;
  Panel p0 = gk15(f, z, s);
  r.evaluations = 15;
  heap.push(p0);
  cplx total = p0.value;
  double err = p0.err;
  int panels = 1;
  while (!accepted(err, total, spec)) {
    if (panels >= spec.max_panels)
      throw NonConvergenceError("segment quadrature exceeded max_panels", total, err);
    Panel worst = heap.top();
    heap.pop();
    const cplx mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    r.evaluations += 30;
    ++panels;
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    // Guard against drift of the running sums.
    if (panels % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().err;
        copy.pop();
      }
    }
  }
  // Recompute the final sum in a fixed order (by panel start along the segment).
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  const cplx dir = s - z;
  std::sort(all.begin(), all.end(), [&](const Panel& a, const Panel& b) {
    return std::real((a.a - z) / dir) < std::real((b.a - z) / dir);
  });
  total = 0.0;
  err = 0.0;
  for (auto& p : all) {
    total += p.value;
    err += p.err;
  }
  r.value = total;
  r.error_estimate = err;
  return r;
}

namespace {

struct Grid {
  std::vector<double> x;
  double h;
};

Grid make_grid(double radius, long long n) {
  Grid g;
  g.h = 2.0 * radius / double(n);
  g.x.resize(n + 1);
  for (long long j = 0; j <= n; ++j) g.x[j] = -radius + double(j) * g.h;
  return g;
}

template <class LevelSum>
IntegralResult tensor_ladder(int d, const QuadSpec& spec, const std::array<double, 3>& max_step,
                             LevelSum&& level_sum) {
  check_spec(spec);
  if (d < 1 || d > 3) fail(ErrorCode::Domain, "tensor quadrature supports 1 <= d <= 3");
  std::array<long long, 3> n{1, 1, 1};
  for (int i = 0; i < d; ++i) {
    if (!(spec.trunc_radius[i] > 0.0))
      fail(ErrorCode::Domain, "tensor quadrature needs positive truncation radii");
    n[i] = start_intervals(spec.trunc_radius[i]);
  }
  IntegralResult r;
  bool have_prev = false;
  double err = 0.0;
  for (;;) {
    std::array<Grid, 3> g;
    double vol = 1.0;
    bool fine = true;
    for (int i = 0; i < d; ++i) {
      g[i] = make_grid(spec.trunc_radius[i], n[i]);
      vol *= g[i].h;
      fine = fine && g[i].h <= std::min(spec.max_step, max_step[i]);
    }
    long long evals = 0;
    const cplx value = vol * level_sum(g, evals);
    r.evaluations += evals;
    if (have_prev) {
      err = std::abs(value - r.value);
      r.value = value;
      r.error_estimate = err;
      if (fine && accepted(err, value, spec)) return r;
    } else {
      r.value = value;
    }
    have_prev = true;
    for (int i = 0; i < d; ++i) {
      if (2 * n[i] > spec.max_nodes_per_axis())
        throw NonConvergenceError("tensor quadrature exceeded its node budget", r.value, err);
      n[i] *= 2;
    }
  }
}

}  // namespace

IntegralResult tensor_integrate(const std::function<cplx(const double*)>& f, int d,
                                const QuadSpec& spec) {
  const std::array<double, 3> no_limit{1e300, 1e300, 1e300};
  return tensor_ladder(d, spec, no_limit, [&](const std::array<Grid, 3>& g, long long& evals) {
    double x[3] = {0.0, 0.0, 0.0};
    cplx acc = 0.0;
    const size_t n0 = g[0].x.size();
    const size_t n1 = d > 1 ? g[1].x.size() : 1;
    const size_t n2 = d > 2 ? g[2].x.size() : 1;
    for (size_t i = 0; i < n0; ++i) {
      x[0] = g[0].x[i];
      for (size_t j = 0; j < n1; ++j) {
        if (d > 1) x[1] = g[1].x[j];
        for (size_t k = 0; k < n2; ++k) {
          if (d > 2) x[2] = g[2].x[k];
          acc += f(x);
        }
      }
    }
    evals += static_cast<long long>(n0 * n1 * n2);
    return acc;
  });
}

cplx exp_weighted_sum(const std::vector<cplx>& v, double x0, double h, cplx kappa) {
  constexpr size_t kAnchor = 64;
  const cplx ratio = std::exp(kappa * h);
  cplx acc = 0.0;
  cplx w = 0.0;
  for (size_t j = 0; j < v.size(); ++j) {
    if (j % kAnchor == 0)
      w = std::exp(kappa * (x0 + double(j) * h));
    else
      w *= ratio;
    acc += v[j] * w;
  }
  return acc;
}

IntegralResult coupled_integrate(const std::vector<std::function<cplx(double)>>& axis,
                                 const std::array<std::array<cplx, 3>, 3>& c,
                                 const QuadSpec& spec) {
  const int d = static_cast<int>(axis.size());
  // Imaginary couplings oscillate with frequency growing along the other axes.
  std::array<double, 3> max_step{1e300, 1e300, 1e300};
  for (int i = 0; i < d; ++i) {
    double omega = 0.0;
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const cplx cij = i < j ? c[i][j] : c[j][i];
      omega += 2.0 * std::abs(cij.imag()) * spec.trunc_radius[j];
    }
    max_step[i] = oscillation_step(omega);
  }
  return tensor_ladder(d, spec, max_step, [&](const std::array<Grid, 3>& g, long long& evals) {
    std::array<std::vector<cplx>, 3> v;
    for (int i = 0; i < d; ++i) {
      v[i].resize(g[i].x.size());
      for (size_t j = 0; j < g[i].x.size(); ++j) v[i][j] = axis[i](g[i].x[j]);
      evals += static_cast<long long>(g[i].x.size());
    }
    if (d == 1) {
      cplx acc = 0.0;
      for (auto& z : v[0]) acc += z;
      return acc;
    }
    const Grid& last = g[d - 1];
    cplx acc = 0.0;
    if (d == 2) {
      for (size_t i = 0; i < v[0].size(); ++i) {
        if (v[0][i] == cplx(0.0)) continue;
        const cplx kappa = -2.0 * c[0][1] * g[0].x[i];
        acc += v[0][i] * exp_weighted_sum(v[1], last.x[0], last.h, kappa);
      }
      return acc;
    }
    for (size_t i = 0; i < v[0].size(); ++i) {
      if (v[0][i] == cplx(0.0)) continue;
      const double x1 = g[0].x[i];
      cplx row = 0.0;
      for (size_t j = 0; j < v[1].size(); ++j) {
        if (v[1][j] == cplx(0.0)) continue;
        const double x2 = g[1].x[j];
        const cplx kappa = -2.0 * (c[0][2] * x1 + c[1][2] * x2);
        row += v[1][j] * std::exp(-2.0 * c[0][1] * x1 * x2) *
               exp_weighted_sum(v[2], last.x[0], last.h, kappa);
      }
      acc += v[0][i] * row;
    }
    return acc;
  });
}

}  // namespace dxi
