// Left- and right-hand sides of the identity catalog.
#include <cmath>
#include <numbers>

#include "dxi/xi_multi.hpp"
#include "funceq_internal.hpp"

namespace dxi::detail {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

using Vec = std::vector<cplx>;

void need(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::Domain, what);
}

void need_dim(const VerificationRequest& r, int d, const char* name) {
  need(r.rho.dim() == d, std::string(name) + ": rho must be " + std::to_string(d) + "x" +
                             std::to_string(d));
  need(static_cast<int>(r.s.size()) == d,
       std::string(name) + ": s must have " + std::to_string(d) + " entries");
}

void need_converges(const RhoMatrix& m, const std::string& what) {
  const auto why = m.convergence_failure();
  need(why.empty(), what + ": " + why);
}

void need_positive(cplx z, const std::string& what) { need(z.real() > 0.0, what); }

cplx ex(cplx z) { return std::exp(z); }

// e(rho, s) closed form with the argument shifts of the product expansion.
cplx e3(const RhoMatrix& rho, cplx a, cplx b, cplx c) { return closed_form_e(rho, {a, b, c}); }

Sides telescope(const VerificationRequest& r, Tally& t) {
  const cplx rho = r.rho(0, 0);
  const cplx s = r.s[0];
  const int m = extra_int(r, "m", 0);
  const QuadSpec& q = t.spec_for(1);
  const cplx a = t.take(xi_sum_m(rho, s, m, q));
  const cplx b = t.take(xi_sum_m(rho, 1.0 - double(m) - s, m, q));
  return {a - b, telescope_rhs(rho, s, m), {}};
}

Sides sk_flip(const VerificationRequest& r, Tally& t) {
  const int k = extra_int(r, "k", 0);
  return {t.xi(r.rho, r.s), sk_flip_rhs(r.rho, r.s, k, t), {}};
}

// The two right-hand sides of the 2D functional equation.
Sides fun_2d(const VerificationRequest& r, Tally& t, bool eleven) {
  const cplx r11 = r.rho(0, 0), r12 = r.rho(0, 1), r22 = r.rho(1, 1);
  const cplx s1 = r.s[0], s2 = r.s[1];
  const cplx det = r.rho.det();
  const cplx lhs = t.xi(r.rho, r.s) - t.xi(r.rho, {1.0 - s1, 1.0 - s2});
  const cplx q1 = det / r11, q2 = det / r22;
  const cplx term2 =
      kSqrtPi / (2.0 * std::sqrt(r22)) *
      (ex((s2 - 1.0) * (s2 - 1.0) / (16.0 * r22)) * t.xi1(q2, 1.0 - s1 - r12 / r22 * (1.0 - s2)) -
       ex(s2 * s2 / (16.0 * r22)) * t.xi1(q2, 1.0 - s1 + r12 / r22 * s2));
  if (eleven) {
    const cplx term1 =
        kSqrtPi / (2.0 * std::sqrt(r11)) *
        (ex((s1 - 1.0) * (s1 - 1.0) / (16.0 * r11)) * t.xi1(q1, s2 + r12 / r11 * (1.0 - s1)) -
         ex(s1 * s1 / (16.0 * r11)) * t.xi1(q1, s2 - r12 / r11 * s1));
    return {lhs, term1 + term2, {}};
  }
  const cplx d16 = 16.0 * det;
  const cplx bracket =
      kPi * ex((r22 * s1 * s1 + r11 * s2 * s2 - 2.0 * r12 * s1 * s2) / d16) /
      (4.0 * std::sqrt(det)) *
      (1.0 + ex((r11 + r22 - 2.0 * r12 - 2.0 * r22 * s1 - 2.0 * r11 * s2 + 2.0 * r12 * (s1 + s2)) / d16) -
       ex((r22 - 2.0 * r22 * s1 + 2.0 * r12 * s2) / d16) -
       ex((r11 - 2.0 * r11 * s2 + 2.0 * r12 * s1) / d16));
  const cplx term1 =
      kSqrtPi / (2.0 * std::sqrt(r11)) *
      (ex((s1 - 1.0) * (s1 - 1.0) / (16.0 * r11)) * t.xi1(q1, 1.0 - s2 - r12 / r11 * (1.0 - s1)) -
       ex(s1 * s1 / (16.0 * r11)) * t.xi1(q1, 1.0 - s2 + r12 / r11 * s1));
  return {lhs, bracket + term2 + term1, {{"inhomogeneity", bracket}}};
}

Sides funcor1(const VerificationRequest& r, Tally& t) {
  const cplx r11 = r.rho(0, 0), r12 = r.rho(0, 1);
  const cplx s = r.s[0];
  const cplx q = r.rho.det() / r11;
  const cplx lhs = t.xi(r.rho, {s, s}) - t.xi(r.rho, {1.0 - s, 1.0 - s});
  const cplx rhs = std::sqrt(kPi / r11) *
                   (ex((s - 1.0) * (s - 1.0) / (16.0 * r11)) * t.xi1(q, 1.0 - s - r12 / r11 * (1.0 - s)) -
                    ex(s * s / (16.0 * r11)) * t.xi1(q, 1.0 - s + r12 / r11 * s));
  return {lhs, rhs, {}};
}

Sides funcor2(const VerificationRequest& r, Tally& t) {
  const cplx r11 = r.rho(0, 0), r12 = r.rho(0, 1);
  const cplx s = r.s[0];
  const cplx q = r.rho.det() / r11;
  const cplx w = r12 / r11;
  const cplx c16 = 16.0 * r11;
  const cplx comb = ex(s * s / c16) * t.xi1(q, 1.0 - s - w * s) -
                    ex((1.0 - s) * (1.0 - s) / c16) * t.xi1(q, 1.0 - s + w * (1.0 - s)) +
                    ex((s - 1.0) * (s - 1.0) / c16) * t.xi1(q, s - w * (1.0 - s)) -
                    ex(s * s / c16) * t.xi1(q, s + w * s);
  return {comb, 0.0, {}};
}

Sides rho12_roots(const VerificationRequest& r, Tally&) {
  const cplx gamma = extra_required(r, "gamma");
  const int n = extra_int(r, "n", 1);
  const int branch = extra_int(r, "branch", 1);
  const cplx s2 = extra(r, "s2", r.s.empty() ? cplx(0.3) : r.s[0]);
  const int np = extra_int(r, "n_prime", 0);
  const Rho12Root root = rho12_special_roots(gamma, n, branch, s2, np);
  const cplx printed = rho12_printed_root(gamma, root.rho12, s2, n, np);
  return {rho12_combination(gamma, root.rho12, root.s1, s2),
          0.0,
          {{"rho12", root.rho12},
           {"s1", root.s1},
           {"swapped_combination", rho12_combination(gamma, root.rho12, s2, root.s1)},
           {"printed_root_combination", rho12_combination(gamma, root.rho12, printed, s2)}}};
}

Sides mean_value(const VerificationRequest& r, Tally& t) {
  const cplx r11 = r.rho(0, 0), r12 = r.rho(0, 1), r22 = r.rho(1, 1);
  const QuadSpec& q = t.spec_for(1);
  const cplx lhs = t.take(fubini_convolution(r11, r22, r12, r.s[0], r.s[1], q));
  const cplx rhs = t.take(fubini_closed(r11, r22, r12, r.s[0], r.s[1], q));
  return {lhs, rhs, {}};
}

// C_k(x, y, z) of the 3D product expansion (sign of the T-terms as derived).
cplx c_term(const RhoMatrix& rho, int k, cplx x, cplx y, cplx z, int sign, Tally& t) {
  int i = -1, j = -1;
  for (int a = 0; a < 3; ++a)
    if (a != k) (i < 0 ? i : j) = a;
  const cplx rij = rho.R(i, j);
  const cplx pre = 1.0 / std::sqrt(rij) *
                   ex((rho(j, j) * x * x + rho(i, i) * y * y - 2.0 * rho(i, j) * x * y) / (16.0 * rij));
  const cplx arg = 1.0 - z + double(sign) * (x * rho.T(k, i, j) + y * rho.T(k, j, i)) / rij;
  return pre * t.xi1(rho.det() / rij, arg);
}

cplx c_sum(const RhoMatrix& rho, const Vec& s, int sign, Tally& t) {
  const cplx s1 = s[0], s2 = s[1], s3 = s[2];
  auto block = [&](int k, cplx a, cplx b, cplx z) {
    return c_term(rho, k, a, b, z, sign, t) - c_term(rho, k, a, b - 1.0, z, sign, t) +
           c_term(rho, k, a - 1.0, b - 1.0, z, sign, t) - c_term(rho, k, a - 1.0, b, z, sign, t);
  };
  return block(2, s1, s2, s3) + block(1, s1, s3, s2) + block(0, s2, s3, s1);
}

Sides result3d(const VerificationRequest& r, Tally& t) {
  const RhoMatrix& rho = r.rho;
  const Vec& s = r.s;
  const cplx s1 = s[0], s2 = s[1], s3 = s[2];
  const cplx lhs = t.xi(rho, s) - t.xi(rho, {1.0 - s1, 1.0 - s2, 1.0 - s3});
  // Eight closed-form Gaussians with the alternating signs of the product expansion.
  const cplx e_sum = e3(rho, s1, s2 - 1.0, s3) - e3(rho, s1 - 1.0, s2, s3 - 1.0) +
                     e3(rho, s1 - 1.0, s2, s3) - e3(rho, s1 - 1.0, s2 - 1.0, s3) +
                     e3(rho, s1 - 1.0, s2 - 1.0, s3 - 1.0) - e3(rho, s1, s2, s3) +
                     e3(rho, s1, s2, s3 - 1.0) - e3(rho, s1, s2 - 1.0, s3 - 1.0);
  const cplx e_missing = e3(rho, s1 - 1.0, s2 - 1.0, s3 - 1.0);
  cplx two_d = 0.0;
  for (int k = 0; k < 3; ++k) {
    int i = -1, j = -1;
    for (int a = 0; a < 3; ++a)
      if (a != k) (i < 0 ? i : j) = a;
    const cplx rkk = rho(k, k);
    const RhoMatrix block = reduce_k(rho, k);
    const cplx sk = s[k];
    const Vec a1{1.0 - s[i] + (sk - 1.0) * rho(i, k) / rkk, 1.0 - s[j] + (sk - 1.0) * rho(j, k) / rkk};
    const Vec a2{1.0 - s[i] + sk * rho(i, k) / rkk, 1.0 - s[j] + sk * rho(j, k) / rkk};
    two_d += 1.0 / std::sqrt(rkk) *
             (ex((sk - 1.0) * (sk - 1.0) / (16.0 * rkk)) * t.xi(block, a1) -
              ex(sk * sk / (16.0 * rkk)) * t.xi(block, a2));
  }
  const cplx c_new = c_sum(rho, s, +1, t);
  const cplx c_old = c_sum(rho, s, -1, t);
  const cplx rhs = e_sum / 8.0 + kPi / 4.0 * c_new + kSqrtPi / 2.0 * two_d;
  // As printed: 1/4 on the e-terms, sqrt(pi)/4 on the 2D terms, flipped C-sign.
  const cplx printed_plus = e_sum / 4.0 + kPi / 4.0 * c_old + kSqrtPi / 4.0 * two_d;
  const cplx printed_minus = printed_plus - 2.0 * e_missing / 4.0;
  return {lhs,
          rhs,
          {{"as_printed_residual_plus", lhs - printed_plus},
           {"as_printed_residual_minus", lhs - printed_minus}}};
}

Sides six_term(const VerificationRequest& r, Tally& t) {
  const RhoMatrix& rho = r.rho;
  Vec h(3);
  for (int i = 0; i < 3; ++i) h[i] = (1.0 + r.s[i]) / 2.0;
  const cplx lhs = t.xi(rho, h);
  // One flip along the third axis ...
  const cplx mid = sk_flip_rhs(rho, h, 2, t);
  // ... and the two-step passage through the first and second axes.
  Vec h1 = h;
  h1[0] = 1.0 - h1[0];
  const cplx right = sk_flip_rhs(flip_k(rho, 0), h1, 1, t) + sk_flip_correction(rho, h, 0, t);
  return {lhs, mid, {{"second_path", right}, {"second_path_residual", lhs - right}}};
}

RhoMatrix step4_matrix(cplx rho, cplx gamma, cplx s, int sign) {
  const cplx sg = double(sign) * s * gamma;
  return RhoMatrix::three(rho + s * s * gamma, s * s * gamma, sg, rho + s * s * gamma, sg, gamma);
}

cplx square_difference(cplx rho, cplx s, Tally& t) {
  const cplx a = t.xi1(rho, (1.0 + s) / 2.0), b = t.xi1(rho, (1.0 - s) / 2.0);
  return a * a - b * b;
}

Sides rewrite_3d_a(const VerificationRequest& r, Tally& t) {
  const cplx rho = r.rho(0, 0), s = r.s[0], gamma = extra_required(r, "gamma");
  const Vec half{0.5, 0.5, 0.5};
  const cplx lhs = t.xi(step4_matrix(rho, gamma, s, +1), half);
  const cplx rhs = t.xi(step4_matrix(rho, gamma, s, -1), half);
  const cplx sq = square_difference(rho, s, t);
  return {lhs,
          rhs,
          {{"xi_square_difference", sq},
           {"predicted_difference", std::sqrt(kPi / gamma) / 2.0 * ex(1.0 / (64.0 * gamma)) * sq}}};
}

// Both sides of the Step-7 / Moebius form, parameterised by alpha.
Sides step7_sides(cplx rho, cplx alpha, cplx s, Tally& t) {
  const RhoMatrix mp = rewrite_matrix(rho, alpha, s, +1);
  const RhoMatrix mm = rewrite_matrix(rho, alpha, s, -1);
  const cplx u = alpha * s * s / rho, v = alpha * s / rho;
  const cplx u1 = (1.0 + u) / 2.0, u1b = (1.0 - u) / 2.0;
  const cplx vp = (1.0 + v) / 2.0, vm = (1.0 - v) / 2.0;
  const cplx lhs = t.xi(mp, {u1, vp}) - t.xi(mp, {u1b, vm});
  const cplx rhs = t.xi(mm, {u1, vm}) - t.xi(mm, {u1b, vp});
  return {lhs, rhs, {{"xi_square_difference", square_difference(rho, s, t)}}};
}

Sides rewrite_3d_b(const VerificationRequest& r, Tally& t) {
  const cplx rho = r.rho(0, 0), s = r.s[0], gamma = extra_required(r, "gamma");
  const cplx d = rho + gamma * s * s;
  Sides out = step7_sides(rho, gamma * rho / d, s, t);
  out.aux.push_back({"alpha", gamma * rho / d});
  return out;
}

Sides mobius_rewrite(const VerificationRequest& r, Tally& t) {
  return step7_sides(r.rho(0, 0), extra_required(r, "alpha"), r.s[0], t);
}

Sides rewrite_2d(const VerificationRequest& r, Tally& t) {
  const cplx rho = r.rho(0, 0), s = r.s[0], alpha = extra_required(r, "alpha");
  const int n = extra_int(r, "n", 0);
  const cplx c = rewrite_2d_arg(alpha, n);
  const cplx lhs = t.xi(rewrite_matrix(rho, alpha, s, +1), {(1.0 - c * s) / 2.0, (1.0 - c) / 2.0});
  const cplx rhs = t.xi(rewrite_matrix(rho, alpha, s, -1), {(1.0 - c * s) / 2.0, (1.0 + c) / 2.0});
  const cplx sum = t.xi1(rho, (1.0 + s) / 2.0) + t.xi1(rho, (1.0 - s) / 2.0);
  return {lhs, rhs, {{"xi_sum", sum}}};
}

}  // namespace

RhoMatrix rewrite_matrix(cplx rho, cplx alpha, cplx s, int sign) {
  return RhoMatrix::two(rho + alpha * s * s, double(sign) * alpha * s, alpha);
}

cplx rewrite_2d_arg(cplx alpha, int n) { return cplx(0.0, 16.0 * kPi * (1.0 + 2.0 * n)) * alpha; }

cplx sk_flip_correction(const RhoMatrix& rho, const Vec& s, int k, Tally& t) {
  const int d = rho.dim();
  const cplx rkk = rho(k, k);
  const RhoMatrix red = reduce_k(rho, k);
  Vec sa, sb;
  for (int i = 0; i < d; ++i) {
    if (i == k) continue;
    sa.push_back(s[i] - (s[k] - 1.0) * rho(i, k) / rkk);
    sb.push_back(s[i] - s[k] * rho(i, k) / rkk);
  }
  const cplx c = std::sqrt(kPi / rkk) / 2.0;
  return c * ex((s[k] - 1.0) * (s[k] - 1.0) / (16.0 * rkk)) * t.xi(red, sa) -
         c * ex(s[k] * s[k] / (16.0 * rkk)) * t.xi(red, sb);
}

cplx sk_flip_rhs(const RhoMatrix& rho, const Vec& s, int k, Tally& t) {
  Vec flipped = s;
  flipped[k] = 1.0 - s[k];
  return t.xi(flip_k(rho, k), flipped) + sk_flip_correction(rho, s, k, t);
}

void hypotheses(const VerificationRequest& r) {
  const std::string name(identity_name(r.id));
  for (const cplx& z : r.s)
    need(std::isfinite(z.real()) && std::isfinite(z.imag()), name + ": non-finite s");
  switch (r.id) {
    case IdentityId::Telescope:
      need_dim(r, 1, name.c_str());
      need_positive(r.rho(0, 0), name + ": Re(rho) must be positive");
      need(extra_int(r, "m", 0) >= 0, name + ": m must be a nonnegative integer");
      return;
    case IdentityId::SkFlip: {
      need(r.rho.dim() >= 2, name + ": rho must be 2x2 or 3x3");
      need_dim(r, r.rho.dim(), name.c_str());
      need_converges(r.rho, name);
      const int k = extra_int(r, "k", 0);
      need(k >= 0 && k < r.rho.dim(), name + ": k out of range");
      need_converges(reduce_k(r.rho, k), name + " (reduced matrix)");
      return;
    }
    case IdentityId::Fun1:
    case IdentityId::Fun11:
      need_dim(r, 2, name.c_str());
      need_converges(r.rho, name);
      need_positive(r.rho.det() / r.rho(0, 0), name + ": Re(det/rho11) must be positive");
      need_positive(r.rho.det() / r.rho(1, 1), name + ": Re(det/rho22) must be positive");
      return;
    case IdentityId::FunCor1:
    case IdentityId::FunCor2:
      need(r.rho.dim() == 2, name + ": rho must be 2x2");
      need(!r.s.empty() && (r.s.size() == 1 || (r.s.size() == 2 && r.s[0] == r.s[1])),
           name + ": s is a single value (s1 = s2 = s)");
      need(std::abs(r.rho(0, 0) - r.rho(1, 1)) <= 1e-14 * std::abs(r.rho(0, 0)),
           name + ": requires rho11 == rho22");
      need_positive(r.rho(0, 0), name + ": Re(rho11) must be positive");
      need(r.rho.real_part().det().real() > 0.0, name + ": det(Re(rho)) must be positive");
      need_positive(r.rho.det() / r.rho(0, 0), name + ": Re(det/rho11) must be positive");
      return;
    case IdentityId::Rho12Roots: {
      const int n = extra_int(r, "n", 1);
      const int b = extra_int(r, "branch", 1);
      need(n != 0, name + ": n must be nonzero");
      need(b == 1 || b == -1, name + ": branch must be +1 or -1");
      need(std::abs(extra_required(r, "gamma")) > 0.0, name + ": gamma must be nonzero");
      return;
    }
    case IdentityId::MeanValue: {
      need_dim(r, 2, name.c_str());
      need_converges(r.rho, name);
      const cplx q = r.rho(0, 0) + r.rho(1, 1) - 2.0 * r.rho(0, 1);
      need_positive(q, name + ": Re(rho11 + rho22 - 2 rho12) must be positive");
      need_positive(r.rho.det() / r.rho(1, 1), name + ": Re(det/rho22) must be positive");
      need_positive(r.rho.det() / q, name + ": Re(det/q) must be positive");
      return;
    }
    case IdentityId::Result3D:
    case IdentityId::SixTerm:
      need_dim(r, 3, name.c_str());
      need_converges(r.rho, name);
      for (int k = 0; k < 3; ++k) {
        need_converges(reduce_k(r.rho, k), name + " (reduced block)");
        for (int j = k + 1; j < 3; ++j)
          need_positive(r.rho.det() / r.rho.R(k, j), name + ": Re(det/R_ij) must be positive");
      }
      if (r.id == IdentityId::SixTerm) {
        need_converges(reduce_k(flip_k(r.rho, 0), 1), name + " (reduced block)");
      }
      return;
    case IdentityId::Rewrite3DA:
    case IdentityId::Rewrite3DB:
    case IdentityId::Rewrite2D:
    case IdentityId::MobiusRewrite: {
      need(r.rho.dim() == 1 && r.s.size() == 1, name + ": rho and s are scalars");
      const cplx rho = r.rho(0, 0), s = r.s[0];
      need_positive(rho, name + ": Re(rho) must be positive");
      if (r.id == IdentityId::Rewrite3DA || r.id == IdentityId::Rewrite3DB) {
        const cplx gamma = extra_required(r, "gamma");
        need_positive(gamma, name + ": Re(gamma) must be positive");
        need_converges(step4_matrix(rho, gamma, s, +1), name);
        if (r.id == IdentityId::Rewrite3DB) {
          const cplx d = rho + gamma * s * s;
          need(std::abs(d) > 0.0, name + ": rho + gamma s^2 must be nonzero");
          const cplx alpha = gamma * rho / d;
          need_converges(rewrite_matrix(rho, alpha, s, +1), name + " (2x2 form)");
        }
        return;
      }
      const cplx alpha = extra_required(r, "alpha");
      const cplx top = rho + alpha * s * s;
      need(top.real() > 0.0 && alpha.real() > 0.0, name + ": needs Re(rho + alpha s^2) > 0 < Re(alpha)");
      need((alpha * s).real() < std::sqrt(alpha.real() * top.real()),
           name + ": needs Re(alpha s) < sqrt(Re(alpha) Re(rho + alpha s^2))");
      need_converges(rewrite_matrix(rho, alpha, s, +1), name);
      return;
    }
  }
}

Sides evaluate(const VerificationRequest& r, Tally& t) {
  switch (r.id) {
    case IdentityId::Telescope: return telescope(r, t);
    case IdentityId::SkFlip: return sk_flip(r, t);
    case IdentityId::Fun1: return fun_2d(r, t, false);
    case IdentityId::Fun11: return fun_2d(r, t, true);
    case IdentityId::FunCor1: return funcor1(r, t);
    case IdentityId::FunCor2: return funcor2(r, t);
    case IdentityId::Rho12Roots: return rho12_roots(r, t);
    case IdentityId::MeanValue: return mean_value(r, t);
    case IdentityId::Result3D: return result3d(r, t);
    case IdentityId::SixTerm: return six_term(r, t);
    case IdentityId::Rewrite3DA: return rewrite_3d_a(r, t);
    case IdentityId::Rewrite3DB: return rewrite_3d_b(r, t);
    case IdentityId::Rewrite2D: return rewrite_2d(r, t);
    case IdentityId::MobiusRewrite: return mobius_rewrite(r, t);
  }
  fail(ErrorCode::Domain, "unknown identity");
}

}  // namespace dxi::detail
