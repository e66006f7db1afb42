#include "dxi/gaussmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dxi {

namespace {

void check_index(const RhoMatrix& r, int k) {
  if (k < 0 || k >= r.dim()) fail(ErrorCode::Domain, "matrix index out of range");
}

cplx det_of(const RhoMatrix::Entries& m, int d) {
  switch (d) {
    case 1: return m[0][0];
    case 2: return m[0][0] * m[1][1] - m[0][1] * m[0][1];
    default:
      return m[0][0] * m[1][1] * m[2][2] + 2.0 * m[0][1] * m[0][2] * m[1][2] -
             m[0][0] * m[1][2] * m[1][2] - m[1][1] * m[0][2] * m[0][2] -
             m[2][2] * m[0][1] * m[0][1];
  }
}

}  // namespace

RhoMatrix::RhoMatrix(int d) : d_(d) {
  if (d < 1 || d > 3) fail(ErrorCode::Domain, "rho must be 1x1, 2x2 or 3x3");
}

RhoMatrix RhoMatrix::scalar(cplx r) {
  RhoMatrix m(1);
  m.m_[0][0] = r;
  return m;
}

RhoMatrix RhoMatrix::diagonal(const std::vector<cplx>& diag) {
  RhoMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.d_; ++i) m.m_[i][i] = diag[i];
  return m;
}

RhoMatrix RhoMatrix::from_rows(const std::vector<std::vector<cplx>>& rows) {
  RhoMatrix m(static_cast<int>(rows.size()));
  for (int i = 0; i < m.d_; ++i) {
    if (static_cast<int>(rows[i].size()) != m.d_)
      fail(ErrorCode::Domain, "rho must be square");
    for (int j = 0; j < m.d_; ++j) m.m_[i][j] = rows[i][j];
  }
  for (int i = 0; i < m.d_; ++i)
    for (int j = 0; j < i; ++j)
      if (m.m_[i][j] != m.m_[j][i]) fail(ErrorCode::Domain, "rho must be symmetric");
  return m;
}

RhoMatrix RhoMatrix::two(cplx a, cplx b, cplx c) {
  RhoMatrix m(2);
  m.set(0, 0, a);
  m.set(0, 1, b);
  m.set(1, 1, c);
  return m;
}

RhoMatrix RhoMatrix::three(cplx r11, cplx r12, cplx r13, cplx r22, cplx r23, cplx r33) {
  RhoMatrix m(3);
  m.set(0, 0, r11);
  m.set(0, 1, r12);
  m.set(0, 2, r13);
  m.set(1, 1, r22);
  m.set(1, 2, r23);
  m.set(2, 2, r33);
  return m;
}

void RhoMatrix::set(int i, int j, cplx v) {
  check_index(*this, i);
  check_index(*this, j);
  m_[i][j] = v;
  m_[j][i] = v;
}

cplx RhoMatrix::det() const { return det_of(m_, d_); }

cplx RhoMatrix::R(int i, int k) const { return m_[i][i] * m_[k][k] - m_[i][k] * m_[i][k]; }

cplx RhoMatrix::T(int i, int j, int k) const {
  return m_[i][j] * m_[k][k] - m_[i][k] * m_[j][k];
}

RhoMatrix RhoMatrix::real_part() const {
  RhoMatrix r(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) r.m_[i][j] = m_[i][j].real();
  return r;
}

RhoMatrix RhoMatrix::conj() const {
  RhoMatrix r(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) r.m_[i][j] = std::conj(m_[i][j]);
  return r;
}

RhoMatrix RhoMatrix::scaled(cplx f) const {
  RhoMatrix r(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) r.m_[i][j] = f * m_[i][j];
  return r;
}

std::string RhoMatrix::convergence_failure() const {
  for (int i = 0; i < d_; ++i)
    if (!(m_[i][i].real() > 0.0)) return "Re(rho_ii) must be positive";
  const RhoMatrix re = real_part();
  if (d_ == 3)
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (!(re.R(i, j).real() > 0.0)) return "the 2x2 minors of Re(rho) must be positive";
  if (!(re.det().real() > 0.0)) return "det(Re(rho)) must be positive";
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      if (!std::isfinite(m_[i][j].real()) || !std::isfinite(m_[i][j].imag()))
        return "rho has non-finite entries";
  return {};
}

bool RhoMatrix::satisfies_convergence() const { return convergence_failure().empty(); }

void RhoMatrix::require_convergence(const char* who) const {
  const auto why = convergence_failure();
  if (!why.empty()) fail(ErrorCode::Domain, std::string(who) + ": " + why);
}

double RhoMatrix::min_eig_real() const {
  const RhoMatrix re = real_part();
  const auto& a = re.m_;
  if (d_ == 1) return a[0][0].real();
  if (d_ == 2) {
    const double p = a[0][0].real(), q = a[1][1].real(), b = a[0][1].real();
    return 0.5 * (p + q) - std::hypot(0.5 * (p - q), b);
  }
  // Symmetric 3x3, trigonometric form.
  const double a11 = a[0][0].real(), a22 = a[1][1].real(), a33 = a[2][2].real();
  const double a12 = a[0][1].real(), a13 = a[0][2].real(), a23 = a[1][2].real();
  const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
  if (p1 == 0.0) return std::min({a11, a22, a33});
  const double q = (a11 + a22 + a33) / 3.0;
  const double p2 = (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + (a33 - q) * (a33 - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double b11 = (a11 - q) / p, b22 = (a22 - q) / p, b33 = (a33 - q) / p;
  const double b12 = a12 / p, b13 = a13 / p, b23 = a23 / p;
  const double detb = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13) +
                      b13 * (b12 * b23 - b22 * b13);
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

std::vector<cplx> RhoMatrix::solve(const std::vector<cplx>& s) const {
  if (static_cast<int>(s.size()) != d_) fail(ErrorCode::Domain, "vector length must match rho");
  const cplx D = det();
  if (std::abs(D) == 0.0) fail(ErrorCode::Singular, "rho is singular");
  const auto& m = m_;
  std::vector<cplx> out(d_);
  if (d_ == 1) {
    out[0] = s[0] / D;
  } else if (d_ == 2) {
    out[0] = (m[1][1] * s[0] - m[0][1] * s[1]) / D;
    out[1] = (m[0][0] * s[1] - m[0][1] * s[0]) / D;
  } else {
    // Adjugate of a symmetric matrix: entries R and -T style cofactors.
    std::array<std::array<cplx, 3>, 3> adj;
    adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[1][2];
    adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[0][2];
    adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[0][1];
    adj[0][1] = adj[1][0] = m[0][2] * m[1][2] - m[0][1] * m[2][2];
    adj[0][2] = adj[2][0] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    adj[1][2] = adj[2][1] = m[0][1] * m[0][2] - m[0][0] * m[1][2];
    for (int i = 0; i < 3; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += adj[i][j] * s[j];
      out[i] = acc / D;
    }
  }
  return out;
}

cplx RhoMatrix::quad_form_inv(const std::vector<cplx>& s) const {
  const auto y = solve(s);
  cplx acc = 0.0;
  for (int i = 0; i < d_; ++i) acc += s[i] * y[i];
  return acc;
}

cplx RhoMatrix::sqrt_det() const {
  RhoMatrix re = real_part();
  RhoMatrix im(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) im.m_[i][j] = m_[i][j].imag();
  const cplx d0 = re.det();
  if (d0.real() <= 0.0) return std::sqrt(det());  // outside the cone: principal
  cplx root = std::sqrt(d0);
  constexpr int kSteps = 256;
  for (int step = 1; step <= kSteps; ++step) {
    const double tau = double(step) / kSteps;
    RhoMatrix p(d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        p.m_[i][j] = re.m_[i][j] + cplx(0.0, tau) * im.m_[i][j].real();
    const cplx cand = std::sqrt(p.det());
    root = std::abs(cand - root) <= std::abs(cand + root) ? cand : -cand;
  }
  return root;
}

bool RhoMatrix::operator==(const RhoMatrix& o) const {
  if (d_ != o.d_) return false;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      if (m_[i][j] != o.m_[i][j]) return false;
  return true;
}

MinorSet minors(const RhoMatrix& rho) {
  MinorSet ms;
  const int d = rho.dim();
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      ms.R[i][k] = rho.R(i, k);
      for (int j = 0; j < d; ++j) ms.T[i][j][k] = rho.T(i, j, k);
    }
  return ms;
}

cplx closed_form_e(const RhoMatrix& rho, const std::vector<cplx>& s) {
  rho.require_convergence("closed_form_e");
  if (std::abs(rho.det()) == 0.0) fail(ErrorCode::Singular, "closed_form_e: det(rho) = 0");
  const double pd = std::pow(std::numbers::pi, 0.5 * rho.dim());
  return pd / rho.sqrt_det() * std::exp(rho.quad_form_inv(s) / 16.0);
}

RhoMatrix reduce_k(const RhoMatrix& rho, int k) {
  check_index(rho, k);
  if (rho.dim() < 2) fail(ErrorCode::Domain, "reduce_k needs d >= 2");
  const cplx rkk = rho(k, k);
  if (rkk == cplx(0.0)) fail(ErrorCode::Singular, "reduce_k: rho_kk = 0");
  std::vector<int> keep;
  for (int i = 0; i < rho.dim(); ++i)
    if (i != k) keep.push_back(i);
  RhoMatrix out(rho.dim() - 1);
  for (size_t a = 0; a < keep.size(); ++a)
    for (size_t b = a; b < keep.size(); ++b) {
      const int i = keep[a], j = keep[b];
      out.set(int(a), int(b), (i == j ? rho.R(i, k) : rho.T(i, j, k)) / rkk);
    }
  return out;
}

RhoMatrix flip_k(const RhoMatrix& rho, int k) {
  check_index(rho, k);
  RhoMatrix out = rho;
  for (int i = 0; i < rho.dim(); ++i)
    if (i != k) out.set(i, k, -rho(i, k));
  return out;
}

RescaleResult rescale_class(const RhoMatrix& rho, const std::vector<cplx>& s,
                            const std::vector<double>& lambda) {
  const int d = rho.dim();
  if (static_cast<int>(s.size()) != d || static_cast<int>(lambda.size()) != d)
    fail(ErrorCode::Domain, "rescale_class: length mismatch");
  RescaleResult r{RhoMatrix(d), s, 1.0};
  for (int i = 0; i < d; ++i) {
    if (!(lambda[i] > 0.0)) fail(ErrorCode::Domain, "rescale_class: lambda must be positive");
    r.s[i] = s[i] / lambda[i];
    r.prefactor /= lambda[i];
    for (int j = i; j < d; ++j) r.rho.set(i, j, rho(i, j) / (lambda[i] * lambda[j]));
  }
  return r;
}

bool factorisation_condition(const RhoMatrix& rho, int i, int j, int k) {
  check_index(rho, i);
  check_index(rho, j);
  check_index(rho, k);
  double scale = 0.0;
  for (int a = 0; a < rho.dim(); ++a)
    for (int b = 0; b < rho.dim(); ++b) scale = std::max(scale, std::abs(rho(a, b)));
  return std::abs(rho.T(i, j, k)) <= 1e-14 * std::max(scale * scale, 1e-300);
}

}  // namespace dxi
