#include "dxi/funceq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "dxi/xi_core.hpp"
#include "dxi/xi_multi.hpp"
#include "funceq_internal.hpp"

namespace dxi {

namespace {

constexpr double kPi = std::numbers::pi;

struct IdName {
  IdentityId id;
  std::string_view name;
  double tol;
};

constexpr std::array<IdName, kIdentityCount> kIds{{
    {IdentityId::Telescope, "telescope", 1e-9},
    {IdentityId::SkFlip, "sk_flip", 1e-6},
    {IdentityId::Fun1, "fun1", 1e-6},
    {IdentityId::Fun11, "fun11", 1e-6},
    {IdentityId::FunCor1, "funcor1", 1e-7},
    {IdentityId::FunCor2, "funcor2", 1e-7},
    {IdentityId::Rho12Roots, "rho12_roots", 1e-10},
    {IdentityId::MeanValue, "mean_value", 1e-7},
    {IdentityId::Result3D, "result3d", 1e-5},
    {IdentityId::SixTerm, "sixterm", 1e-5},
    {IdentityId::Rewrite3DA, "rewrite_3d_a", 1e-4},
    {IdentityId::Rewrite3DB, "rewrite_3d_b", 1e-4},
    {IdentityId::Rewrite2D, "rewrite_2d", 1e-6},
    {IdentityId::MobiusRewrite, "mobius_rewrite", 1e-4},
}};

thread_local std::optional<VerificationReport> g_partial;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  return out;
}

}  // namespace

IdentityId identity_from_index(int i) {
  if (i < 0 || i >= kIdentityCount) fail(ErrorCode::Domain, "identity index out of range");
  return kIds[i].id;
}

std::string_view identity_name(IdentityId id) {
  for (const auto& e : kIds)
    if (e.id == id) return e.name;
  return "unknown";
}

IdentityId parse_identity(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& e : kIds)
    if (e.name == key) return e.id;
  fail(ErrorCode::Parse, "unknown identity '" + std::string(name) + "'");
}

double default_tolerance(IdentityId id) {
  for (const auto& e : kIds)
    if (e.id == id) return e.tol;
  return 1e-6;
}

namespace detail {

Tally::Tally(const std::optional<QuadSpec>& o)
    : spec1(o ? *o : QuadSpec::for_dimension(1)),
      spec2(o ? *o : QuadSpec::for_dimension(2)),
      spec3(o ? *o : QuadSpec::for_dimension(3)) {}

const QuadSpec& Tally::spec_for(int d) const { return d <= 1 ? spec1 : d == 2 ? spec2 : spec3; }

cplx Tally::take(const XiValue& v) {
  evaluations += v.evaluations;
  precision_warning = precision_warning || v.precision_warning;
  return v.value;
}

cplx Tally::xi(const RhoMatrix& rho, const std::vector<cplx>& s) {
  if (rho.dim() == 1) return xi1(rho(0, 0), s.at(0));
  return take(xi_d({rho, s, MultiVariant::Theta}, spec_for(rho.dim())));
}

cplx Tally::xi1(cplx rho, cplx s) { return take(dxi::xi(rho, s, spec1)); }

cplx extra(const VerificationRequest& req, const std::string& key, cplx fallback) {
  const auto it = req.extras.find(key);
  return it == req.extras.end() ? fallback : it->second;
}

cplx extra_required(const VerificationRequest& req, const std::string& key) {
  const auto it = req.extras.find(key);
  if (it == req.extras.end())
    fail(ErrorCode::Domain, std::string(identity_name(req.id)) + ": missing parameter '" + key + "'");
  return it->second;
}

int extra_int(const VerificationRequest& req, const std::string& key, int fallback) {
  const cplx v = extra(req, key, double(fallback));
  const double r = std::round(v.real());
  if (v.imag() != 0.0 || r != v.real() || std::abs(r) > 1e6)
    fail(ErrorCode::Domain, std::string(identity_name(req.id)) + ": '" + key + "' must be an integer");
  return static_cast<int>(r);
}

}  // namespace detail

void check_hypotheses(const VerificationRequest& req) { detail::hypotheses(req); }

VerificationReport verify(const VerificationRequest& req) {
  g_partial.reset();
  detail::hypotheses(req);
  VerificationReport rep;
  rep.request = req;
  rep.tolerance = req.tol > 0.0 ? req.tol : default_tolerance(req.id);
  rep.request.tol = rep.tolerance;
  detail::Tally tally(req.spec);
  try {
    const detail::Sides sides = detail::evaluate(req, tally);
    rep.lhs = sides.lhs;
    rep.rhs = sides.rhs;
    rep.aux = sides.aux;
  } catch (const NonConvergenceError& e) {
    rep.evaluations = tally.evaluations;
    rep.precision_warning = tally.precision_warning;
    rep.aux.push_back({"nonconvergent_estimate", e.best_estimate()});
    rep.abs_residual = std::numeric_limits<double>::quiet_NaN();
    rep.rel_residual = rep.abs_residual;
    g_partial = rep;
    throw;
  }
  rep.evaluations = tally.evaluations;
  rep.precision_warning = tally.precision_warning;
  double abs_res = std::abs(rep.lhs - rep.rhs);
  // Second paths count towards the residual.
  for (const auto& a : rep.aux)
    if (a.name == "second_path_residual") abs_res = std::max(abs_res, std::abs(a.value));
  const double scale = std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1.0});
  rep.abs_residual = abs_res;
  rep.rel_residual = abs_res / std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  if (!std::isfinite(rep.rel_residual)) rep.rel_residual = abs_res == 0.0 ? 0.0 : abs_res;
  rep.pass = std::isfinite(abs_res) && abs_res <= std::max(rep.tolerance, rep.tolerance * scale);
  return rep;
}

const std::optional<VerificationReport>& last_partial_report() { return g_partial; }

// ---------------------------------------------------------------- roots

ZeroFamily parse_zero_family(std::string_view name) {
  const std::string key = lower(name);
  if (key == "telescope") return ZeroFamily::Telescope;
  if (key == "tilde") return ZeroFamily::Tilde;
  if (key == "funcor1") return ZeroFamily::FunCor1;
  if (key == "funcor2") return ZeroFamily::FunCor2;
  fail(ErrorCode::Parse, "unknown zero family '" + std::string(name) + "'");
}

std::string_view zero_family_name(ZeroFamily f) {
  switch (f) {
    case ZeroFamily::Telescope: return "telescope";
    case ZeroFamily::Tilde: return "tilde";
    case ZeroFamily::FunCor1: return "funcor1";
    case ZeroFamily::FunCor2: return "funcor2";
  }
  return "unknown";
}

namespace {

void check_funcor_rho(const RhoMatrix& rho) {
  if (rho.dim() != 2) fail(ErrorCode::Domain, "funcor roots need a 2x2 rho");
  if (std::abs(rho(0, 0) - rho(1, 1)) > 1e-14 * std::abs(rho(0, 0)))
    fail(ErrorCode::Domain, "funcor roots need rho11 == rho22");
}

// 1/2 -+ r12/(2(r11 -+ r12)) - 8 det/(r11 -+ r12) [2 pi i k + ln(1 + b sqrt(1 - e^{-+r12/8det}))]
cplx funcor_root(const RhoMatrix& rho, int sign, int k, int branch) {
  const cplx r11 = rho(0, 0), r12 = rho(0, 1), det = rho.det();
  const cplx den = r11 - double(sign) * r12;
  if (std::abs(den) == 0.0) fail(ErrorCode::Degenerate, "funcor roots: rho11 = +-rho12");
  if (std::abs(det) == 0.0) fail(ErrorCode::Degenerate, "funcor roots: det(rho) = 0");
  const cplx inner = 1.0 + double(branch) * std::sqrt(1.0 - std::exp(-double(sign) * r12 / (8.0 * det)));
  if (std::abs(inner) == 0.0) fail(ErrorCode::Degenerate, "funcor roots: logarithm of zero");
  return 0.5 - double(sign) * r12 / (2.0 * den) -
         8.0 * det / den * (cplx(0.0, 2.0 * kPi * k) + std::log(inner));
}

}  // namespace

std::vector<CandidateRoot> candidate_zeros(ZeroFamily f, const RhoMatrix& rho, int m, int k_lo,
                                           int k_hi) {
  if (k_hi < k_lo) fail(ErrorCode::Domain, "candidate_zeros: empty index range");
  if (k_hi - k_lo > 100000) fail(ErrorCode::Domain, "candidate_zeros: index range too large");
  std::vector<CandidateRoot> out;
  switch (f) {
    case ZeroFamily::Telescope:
    case ZeroFamily::Tilde: {
      if (rho.dim() != 1) fail(ErrorCode::Domain, "candidate_zeros: rho must be scalar");
      if (m < 0) fail(ErrorCode::Domain, "candidate_zeros: m must be nonnegative");
      require_rho(rho(0, 0), "candidate_zeros");
      const double shift = f == ZeroFamily::Tilde ? -0.5 : 0.0;
      for (int k = k_lo; k <= k_hi; ++k) {
        const cplx im = cplx(0.0, 16.0 * kPi) * rho(0, 0) * (shift + double(k) / (1.0 + m));
        out.push_back({(1.0 - m) / 2.0 + im, k, 0});
      }
      return out;
    }
    case ZeroFamily::FunCor1:
    case ZeroFamily::FunCor2: {
      check_funcor_rho(rho);
      const int sign = f == ZeroFamily::FunCor1 ? 1 : -1;
      for (int k = k_lo; k <= k_hi; ++k)
        for (int b : {1, -1}) out.push_back({funcor_root(rho, sign, k, b), k, b});
      return out;
    }
  }
  return out;
}

cplx zero_confirmation(ZeroFamily f, const RhoMatrix& rho, int m, cplx s, const QuadSpec& spec) {
  switch (f) {
    case ZeroFamily::Telescope: {
      const cplx r = rho(0, 0);
      return xi_sum_m(r, s, m, spec).value - xi_sum_m(r, 1.0 - m - s, m, spec).value;
    }
    case ZeroFamily::Tilde: {
      const cplx r = rho(0, 0);
      const double sign = m % 2 ? -1.0 : 1.0;
      return xi_tilde_sum_m(r, s, m, spec).value + sign * xi_tilde_sum_m(r, 1.0 - m - s, m, spec).value;
    }
    case ZeroFamily::FunCor1:
    case ZeroFamily::FunCor2: {
      VerificationRequest req;
      req.id = f == ZeroFamily::FunCor1 ? IdentityId::FunCor1 : IdentityId::FunCor2;
      req.rho = rho;
      req.s = {s};
      const VerificationReport rep = verify(req);
      return rep.lhs - rep.rhs;
    }
  }
  return 0.0;
}

Rho12Root rho12_special_roots(cplx gamma, int n, int branch, cplx s2, int n_prime) {
  if (n == 0) fail(ErrorCode::Domain, "rho12_special_roots: n must be nonzero");
  if (branch != 1 && branch != -1) fail(ErrorCode::Domain, "rho12_special_roots: branch must be +-1");
  if (gamma == cplx(0.0)) fail(ErrorCode::Domain, "rho12_special_roots: gamma must be nonzero");
  const double c = 32.0 * kPi * n;
  const cplx rho12 = 1.0 / cplx(0.0, c) + double(branch) * std::sqrt(gamma * gamma - 1.0 / (c * c));
  return {rho12, 0.5 + rho12 / gamma * (s2 + double(n_prime) / double(n))};
}

cplx rho12_combination(cplx g, cplx r, cplx s1, cplx s2) {
  const cplx d = 16.0 * (g * g - r * r);
  if (std::abs(d) == 0.0) fail(ErrorCode::Degenerate, "rho12_combination: gamma^2 = rho12^2");
  return 1.0 + std::exp((2.0 * g - 2.0 * r - 2.0 * g * s1 - 2.0 * g * s2 + 2.0 * r * (s1 + s2)) / d) -
         std::exp((g - 2.0 * g * s1 + 2.0 * r * s2) / d) -
         std::exp((g - 2.0 * g * s2 + 2.0 * r * s1) / d);
}

cplx rho12_printed_root(cplx gamma, cplx rho12, cplx s2, int n, int n_prime) {
  return gamma / rho12 * s2 + 2.0 * double(n_prime) / double(n);
}

std::vector<cplx> zero_scan(const std::function<cplx(cplx)>& f, cplx anchor, cplx direction,
                            double length, int grid, double tol) {
  if (!(length > 0.0) || grid < 1 || !(tol > 0.0) || std::abs(direction) == 0.0)
    fail(ErrorCode::Domain, "zero_scan: needs length > 0, grid >= 1, tol > 0 and a direction");
  const int n = 2 * grid;
  const double h = 2.0 * length / n;
  std::vector<double> u(n + 1);
  std::vector<cplx> v(n + 1);
  double re_mag = 0.0, im_mag = 0.0;
  for (int j = 0; j <= n; ++j) {
    u[j] = -length + j * h;
    v[j] = f(anchor + u[j] * direction);
    re_mag = std::max(re_mag, std::abs(v[j].real()));
    im_mag = std::max(im_mag, std::abs(v[j].imag()));
  }
  const bool use_im = im_mag > re_mag;
  auto comp = [&](cplx z) { return use_im ? z.imag() : z.real(); };
  std::vector<cplx> roots;
  for (int j = 0; j < n; ++j) {
    const double a = comp(v[j]), b = comp(v[j + 1]);
    if (a == 0.0) {
      roots.push_back(anchor + u[j] * direction);
      continue;
    }
    if (j + 1 == n && b == 0.0) {
      roots.push_back(anchor + u[n] * direction);
      continue;
    }
    if ((a < 0.0) == (b < 0.0) || b == 0.0) continue;
    double lo = u[j], hi = u[j + 1];
    double flo = a;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = comp(f(anchor + mid * direction));
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(anchor + 0.5 * (lo + hi) * direction);
  }
  return roots;
}

// ---------------------------------------------------------------- draws

namespace {

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int pick(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  cplx c(double re_lo, double re_hi, double im_lo, double im_hi) {
    const double re = uni(re_lo, re_hi);
    return {re, uni(im_lo, im_hi)};
  }
};

RhoMatrix draw_rho(Draw& g, int d, double off, double im) {
  for (;;) {
    RhoMatrix r(d);
    for (int i = 0; i < d; ++i) r.set(i, i, g.c(0.8, 1.3, -im, im));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) r.set(i, j, g.c(-off, off, -im, im));
    bool ok = r.satisfies_convergence() && r.min_eig_real() > 0.3;
    for (int k = 0; ok && d > 1 && k < d; ++k) ok = reduce_k(r, k).satisfies_convergence();
    if (ok) return r;
  }
}

std::vector<cplx> draw_s(Draw& g, int d, double re_lo, double re_hi, double im) {
  std::vector<cplx> s(d);
  for (auto& z : s) z = g.c(re_lo, re_hi, -im, im);
  return s;
}

// First positive y with Re Xi_rho(1/2 + iy/2) = 0, i.e. a common root of
// Xi((1+s)/2) + Xi((1-s)/2) and of the squared difference at s = iy.
double rewrite_root(double rho) {
  auto f = [&](cplx s) { return xi(rho, (1.0 + s) / 2.0).value + xi(rho, (1.0 - s) / 2.0).value; };
  const auto roots = zero_scan(f, cplx(0.0, 6.0), cplx(0.0, 1.0), 6.0, 24);
  for (const cplx& r : roots)
    if (r.imag() > 0.5) return r.imag();
  fail(ErrorCode::NonConvergence, "random_params: no critical-line root in the scan window");
}

}  // namespace

VerificationRequest random_params(IdentityId id, std::uint64_t seed) {
  Draw g(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(id) + 1);
  VerificationRequest r;
  r.id = id;
  r.seed = seed;
  switch (id) {
    case IdentityId::Telescope:
      r.rho = RhoMatrix::scalar(g.uni(0.25, 2.0));
      r.s = {g.c(-1.5, 2.5, -6.0, 6.0)};
      r.extras["m"] = double(g.pick(0, 3));
      break;
    case IdentityId::SkFlip: {
      const int d = g.pick(2, 3);
      r.rho = draw_rho(g, d, 0.25, d == 2 ? 0.1 : 0.0);
      r.s = draw_s(g, d, -0.5, 1.5, d == 2 ? 1.5 : 0.3);
      r.extras["k"] = double(g.pick(0, d - 1));
      break;
    }
    case IdentityId::Fun1:
    case IdentityId::Fun11:
    case IdentityId::MeanValue:
      r.rho = draw_rho(g, 2, 0.3, 0.1);
      r.s = draw_s(g, 2, -0.5, 1.5, 1.5);
      break;
    case IdentityId::FunCor1:
    case IdentityId::FunCor2: {
      const double r11 = g.uni(0.6, 1.4);
      const double r12 = g.uni(0.05, 0.3) * r11;
      r.rho = RhoMatrix::two(r11, r12, r11);
      const auto fam = id == IdentityId::FunCor1 ? ZeroFamily::FunCor1 : ZeroFamily::FunCor2;
      const int k = g.pick(0, 1) == 0 ? 0 : g.pick(-1, 1);
      const int b = g.pick(0, 1) ? 1 : -1;
      for (const auto& root : candidate_zeros(fam, r.rho, 0, k, k))
        if (root.branch == b) r.s = {root.s};
      r.extras["k"] = double(k);
      r.extras["branch"] = double(b);
      break;
    }
    case IdentityId::Rho12Roots: {
      r.rho = RhoMatrix::scalar(1.0);
      int n = g.pick(-3, 3);
      if (n == 0) n = 1;
      r.extras["gamma"] = g.c(0.5, 1.5, -0.2, 0.2);
      r.extras["n"] = double(n);
      r.extras["branch"] = g.pick(0, 1) ? 1.0 : -1.0;
      r.extras["s2"] = g.c(-0.5, 1.0, -0.5, 0.5);
      r.extras["n_prime"] = double(g.pick(-2, 2));
      r.s = {r.extras["s2"]};
      break;
    }
    case IdentityId::Result3D:
    case IdentityId::SixTerm:
      r.rho = draw_rho(g, 3, 0.2, 0.0);
      r.s = draw_s(g, 3, 0.0, 1.0, 0.3);
      break;
    case IdentityId::Rewrite3DA:
    case IdentityId::Rewrite3DB:
    case IdentityId::Rewrite2D:
    case IdentityId::MobiusRewrite: {
      const double rho = g.uni(0.45, 0.55);
      const double y = rewrite_root(rho);
      r.rho = RhoMatrix::scalar(rho);
      r.s = {cplx(0.0, y)};
      if (id == IdentityId::Rewrite3DA || id == IdentityId::Rewrite3DB) {
        r.extras["gamma"] = g.uni(0.4, 0.7) * rho / (2.0 * y * y);
      } else {
        r.extras["alpha"] = g.uni(0.4, 0.65) * rho / (y * y);
        if (id == IdentityId::Rewrite2D) r.extras["n"] = 0.0;
      }
      break;
    }
  }
  detail::hypotheses(r);
  return r;
}

}  // namespace dxi
