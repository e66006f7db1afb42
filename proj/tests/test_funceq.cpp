#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dxi/funceq.hpp"
#include "dxi/xi_core.hpp"

using namespace dxi;
using std::numbers::pi;

namespace {

VerificationReport run(IdentityId id, RhoMatrix rho, std::vector<cplx> s,
                       std::map<std::string, cplx> extras = {}) {
  VerificationRequest q;
  q.id = id;
  q.rho = rho;
  q.s = std::move(s);
  q.extras = std::move(extras);
  return verify(q);
}

}  // namespace

TEST_CASE("every identity passes on ten seeded draws") {
  for (int i = 0; i < kIdentityCount; ++i) {
    const IdentityId id = identity_from_index(i);
    CAPTURE(identity_name(id));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CAPTURE(seed);
      const VerificationRequest q = random_params(id, seed);
      CHECK_NOTHROW(check_hypotheses(q));
      const VerificationReport r = verify(q);
      CHECK(r.pass);
      CHECK(r.tolerance == default_tolerance(id));
      // pass <=> abs_residual <= max(tol, rel_tol * scale)
      const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
      CHECK(r.abs_residual <= std::max(r.tolerance, r.tolerance * scale));
    }
  }
}

TEST_CASE("draws are deterministic") {
  const VerificationRequest a = random_params(IdentityId::Result3D, 7);
  const VerificationRequest b = random_params(IdentityId::Result3D, 7);
  CHECK(a.rho == b.rho);
  CHECK(a.s == b.s);
  CHECK(a.seed.value() == 7);
}

TEST_CASE("names round-trip") {
  for (int i = 0; i < kIdentityCount; ++i) {
    const IdentityId id = identity_from_index(i);
    CHECK(parse_identity(identity_name(id)) == id);
  }
  CHECK_THROWS_AS(parse_identity("nope"), Error);
}

TEST_CASE("worked examples") {
  const VerificationReport t = run(IdentityId::Telescope, RhoMatrix::scalar(0.5), {cplx(2, 3)}, {{"m", 0.0}});
  CHECK(t.pass);
  CHECK(t.abs_residual < 1e-9);

  const VerificationReport f = run(IdentityId::Fun1, RhoMatrix::two(1.0, 0.2, 0.8), {cplx(1, 1), 0.5});
  CHECK(f.pass);
  CHECK(f.abs_residual < 1e-6);
  CHECK(run(IdentityId::Fun11, RhoMatrix::two(1.0, 0.2, 0.8), {cplx(1, 1), 0.5}).pass);

  const VerificationReport m = run(IdentityId::MeanValue, RhoMatrix::two(1.2, 0.1, 1.0), {0.8, 0.6});
  CHECK(m.pass);
  CHECK(m.abs_residual < 1e-7);

  const RhoMatrix r3 = RhoMatrix::three(1.0, 0.2, 0.1, 1.1, 0.15, 0.9);
  const VerificationReport six = run(IdentityId::SixTerm, r3, {0.2, 0.3, 0.4});
  CHECK(six.pass);
  CHECK(six.abs_residual < 1e-5);
  CHECK(run(IdentityId::Result3D, r3, {0.2, 0.3, 0.4}).pass);
  CHECK(run(IdentityId::SkFlip, r3, {cplx(0.2, 1), 0.3, 0.4}, {{"k", 1.0}}).pass);
}

TEST_CASE("hypotheses are enforced") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Parse;
  };
  CHECK(code([] { run(IdentityId::Fun1, RhoMatrix::two(1.0, 1.2, 1.0), {0.5, 0.5}); }) == ErrorCode::Domain);
  CHECK(code([] { run(IdentityId::FunCor1, RhoMatrix::two(1.0, 0.1, 0.8), {0.5}); }) == ErrorCode::Domain);
  CHECK(code([] { run(IdentityId::Result3D, RhoMatrix::two(1.0, 0.1, 0.8), {0.5, 0.5}); }) ==
        ErrorCode::Domain);
  CHECK(code([] { run(IdentityId::Telescope, RhoMatrix::scalar(-1.0), {0.5}); }) == ErrorCode::Domain);
}

TEST_CASE("telescope candidate zeros") {
  const auto z = candidate_zeros(ZeroFamily::Telescope, RhoMatrix::scalar(0.5), 0, -1, 1);
  REQUIRE(z.size() == 3);
  CHECK(std::abs(z[0].s - cplx(0.5, -8 * pi)) < 1e-13);
  CHECK(std::abs(z[1].s - cplx(0.5, 0)) < 1e-15);
  CHECK(std::abs(z[2].s - cplx(0.5, 8 * pi)) < 1e-13);
  for (const auto& r : z)
    CHECK(std::abs(zero_confirmation(ZeroFamily::Telescope, RhoMatrix::scalar(0.5), 0, r.s)) < 1e-8);

  for (int m = 0; m <= 2; ++m) {
    const double rho = 0.3;
    const auto zz = candidate_zeros(ZeroFamily::Telescope, RhoMatrix::scalar(rho), m, -2, 2);
    for (size_t i = 1; i < zz.size(); ++i) {
      CHECK(std::abs((zz[i].s - zz[i - 1].s).imag() - 16 * rho * pi / (1 + m)) < 1e-12);
      CHECK(zz[i].s.real() == (1.0 - m) / 2);
    }
  }
}

TEST_CASE("equivalences: roots and midpoints") {
  // Everything decays like e^{-y^2/16rho} along the root lines, so a small
  // rho keeps the midpoint values far above round-off.
  const double rho = 0.05;
  const RhoMatrix r = RhoMatrix::scalar(rho);
  for (int m = 0; m <= 2; ++m) {
    const double tol = 1e-9;
    const auto zz = candidate_zeros(ZeroFamily::Telescope, r, m, -1, 1);
    for (size_t i = 0; i < zz.size(); ++i) {
      CHECK(std::abs(zero_confirmation(ZeroFamily::Telescope, r, m, zz[i].s)) < tol);
      CHECK(std::abs(telescope_rhs(rho, zz[i].s, m)) < tol);
      if (i + 1 < zz.size()) {
        const cplx mid = (zz[i].s + zz[i + 1].s) / 2.0;
        CHECK(std::abs(zero_confirmation(ZeroFamily::Telescope, r, m, mid)) > 10 * tol);
        CHECK(std::abs(telescope_rhs(rho, mid, m)) > 10 * tol);
      }
    }
  }
  for (int m = 0; m <= 1; ++m) {
    const auto zz = candidate_zeros(ZeroFamily::Tilde, r, m, -1, 1);
    for (size_t i = 0; i < zz.size(); ++i) {
      CHECK(std::abs(zero_confirmation(ZeroFamily::Tilde, r, m, zz[i].s)) < 1e-9);
      if (i + 1 < zz.size())
        CHECK(std::abs(zero_confirmation(ZeroFamily::Tilde, r, m, (zz[i].s + zz[i + 1].s) / 2.0)) > 1e-8);
    }
  }
  // FUNCOR1/2: the identity holds exactly on the root set.
  for (ZeroFamily f : {ZeroFamily::FunCor1, ZeroFamily::FunCor2}) {
    const RhoMatrix r2 = RhoMatrix::two(0.1, 0.01, 0.1);
    const auto zz = candidate_zeros(f, r2, 0, -1, 1);
    REQUIRE(zz.size() == 6);
    for (const auto& z : zz) CHECK(std::abs(zero_confirmation(f, r2, 0, z.s)) < 1e-7);
    for (size_t i = 0; i + 2 < zz.size(); ++i) {
      REQUIRE(zz[i].branch == zz[i + 2].branch);
      CHECK(std::abs(zero_confirmation(f, r2, 0, (zz[i].s + zz[i + 2].s) / 2.0)) > 1e-6);
    }
  }
}

TEST_CASE("FUNCOR1 root with rho11 = 1, rho12 = 0.1, k = 0, + branch") {
  const RhoMatrix r = RhoMatrix::two(1.0, 0.1, 1.0);
  const auto zz = candidate_zeros(ZeroFamily::FunCor1, r, 0, 0, 0);
  const auto it = std::find_if(zz.begin(), zz.end(), [](const CandidateRoot& c) { return c.branch == 1; });
  REQUIRE(it != zz.end());
  const VerificationReport rep = run(IdentityId::FunCor1, r, {it->s});
  CHECK(rep.abs_residual < 1e-7);
}

TEST_CASE("rho12 special roots") {
  const Rho12Root root = rho12_special_roots(1.0, 1, 1, 0.3, 0);
  CHECK(std::abs(rho12_combination(1.0, root.rho12, root.s1, 0.3)) < 1e-10);
  CHECK(std::abs(rho12_combination(1.0, root.rho12, 0.3, root.s1)) < 1e-10);
  const Rho12Root shifted = rho12_special_roots(1.0, 1, 1, 0.3, 1);
  CHECK(std::abs(shifted.s1 - root.s1 - root.rho12 / 1.0) < 1e-14);
  CHECK(std::abs(rho12_combination(1.0, shifted.rho12, shifted.s1, 0.3)) < 1e-10);
  for (int n : {-2, 1, 3})
    for (int b : {-1, 1}) {
      const Rho12Root q = rho12_special_roots(cplx(0.8, 0.1), n, b, cplx(0.2, 0.4), 2);
      CHECK(std::abs(rho12_combination(cplx(0.8, 0.1), q.rho12, q.s1, cplx(0.2, 0.4))) < 1e-10);
    }
  // The root formula as printed is not a root.
  const cplx printed = rho12_printed_root(1.0, root.rho12, 0.3, 1, 0);
  CHECK(std::abs(rho12_combination(1.0, root.rho12, printed, 0.3)) > 1e-3);
  CHECK_THROWS_AS(rho12_special_roots(1.0, 0, 1, 0.3, 0), Error);
}

TEST_CASE("zero_scan") {
  // First positive root at Im = 16 rho pi.  (At rho = 0.5 that root sits where
  // |f| ~ 1e-34, below what double-precision quadrature resolves.)
  const double rho = 0.05;
  auto f = [&](cplx s) { return xi(rho, s).value - xi(rho, 1.0 - s).value; };
  const auto roots = zero_scan(f, 0.5, cplx(0, 1), 4.0, 200);
  bool found = false;
  for (cplx z : roots)
    if (z.imag() > 0.5) {
      CHECK(std::abs(z - cplx(0.5, 16 * rho * pi)) < 1e-8);
      found = true;
      break;
    }
  CHECK(found);
  // Odd about the anchor: roots come in mirrored pairs.
  const auto odd = zero_scan([](cplx u) { return std::sin(u) * std::cos(0.5 * u); }, 0.0, 1.0, 10.0, 200);
  for (cplx z : odd) {
    bool mirrored = false;
    for (cplx w : odd) mirrored |= std::abs(z + w) < 1e-9;
    CHECK(mirrored);
  }
  CHECK(zero_scan([](cplx) { return cplx(1.0); }, 0.0, 1.0, 1.0, 10).empty());
}

TEST_CASE("rewrite equivalence: residuals small at a root, large off it") {
  const VerificationRequest q = random_params(IdentityId::Rewrite2D, 3);
  CHECK(verify(q).pass);
  VerificationRequest off = q;
  off.s[0] += cplx(0, 0.7);
  CHECK_FALSE(verify(off).pass);
}
