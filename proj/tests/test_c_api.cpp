#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <string>

#include "doctest.h"
#include "dxi/dxi.h"
#include "json.hpp"

using nlohmann::json;
using std::numbers::pi;

namespace {

struct Ctx {
  dxi_context* p = nullptr;
  Ctx() { REQUIRE(dxi_context_create(&p) == DXI_OK); }
  ~Ctx() { dxi_context_destroy(p); }
};

json verify(dxi_context* ctx, const json& req, dxi_status* st, int* pass) {
  char* out = nullptr;
  *st = dxi_verify_json(ctx, req.dump().c_str(), &out, pass);
  json j = out ? json::parse(out) : json();
  dxi_string_free(out);
  return j;
}

}  // namespace

TEST_CASE("library metadata") {
  CHECK(std::string(dxi_version()) == "0.1.0");
  CHECK(dxi_identity_count() == 14);
  CHECK(std::string(dxi_identity_name(0)) == "telescope");
  CHECK(dxi_identity_name(99) == nullptr);
  CHECK(std::string(dxi_status_name(DXI_ERR_DOMAIN)) == "domain");
  CHECK(std::string(dxi_report_csv_header()) == "id,params_hash,abs_residual,rel_residual,pass");
}

TEST_CASE("XI_QUAD_TOL overrides the absolute tolerance") {
  unsetenv("XI_QUAD_TOL");
  {
    Ctx c;
    CHECK(dxi_context_abs_tol(c.p, 1) == 1e-12);
    CHECK(dxi_context_abs_tol(c.p, 3) == 1e-9);
  }
  setenv("XI_QUAD_TOL", "1e-9", 1);
  {
    Ctx c;
    CHECK(dxi_context_abs_tol(c.p, 1) == 1e-9);
    CHECK(dxi_context_abs_tol(c.p, 3) == 1e-9);
    CHECK(dxi_context_set_abs_tol(c.p, 1e-11) == DXI_OK);
    CHECK(dxi_context_abs_tol(c.p, 2) == 1e-11);
    CHECK(dxi_context_set_abs_tol(c.p, 0.0) == DXI_OK);
    CHECK(dxi_context_abs_tol(c.p, 2) == 1e-12);
  }
  for (const char* bad : {"abc", "-1", "0", "1e-9x"}) {
    setenv("XI_QUAD_TOL", bad, 1);
    dxi_context* p = nullptr;
    CHECK(dxi_context_create(&p) == DXI_ERR_PARSE);
    CHECK(p == nullptr);
    CHECK(std::strstr(dxi_last_error(), "XI_QUAD_TOL") != nullptr);
  }
  unsetenv("XI_QUAD_TOL");
}

TEST_CASE("argument checking") {
  Ctx c;
  CHECK(dxi_context_create(nullptr) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(dxi_last_error()) > 0);
  const dxi_complex rho{1, 0}, s{0.5, 0};
  dxi_value v;
  CHECK(dxi_eval(nullptr, DXI_FAMILY_XI, &rho, 1, &s, 0, &v) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI, nullptr, 1, &s, 0, &v) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI, &rho, 1, &s, 0, nullptr) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI_D, &rho, 4, &s, 0, &v) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_eval(c.p, static_cast<dxi_family>(42), &rho, 1, &s, 0, &v) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_context_set_rel_tol(c.p, -1) != DXI_OK);
  CHECK(dxi_context_set_max_panels(nullptr, 10) == DXI_ERR_INVALID_ARGUMENT);
  int pass = 0;
  CHECK(dxi_verify_json(c.p, nullptr, nullptr, &pass) == DXI_ERR_INVALID_ARGUMENT);
  dxi_decomposition d;
  CHECK(dxi_decompose(c.p, rho, s, nullptr) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_decompose(nullptr, rho, s, &d) == DXI_ERR_INVALID_ARGUMENT);
}

TEST_CASE("evaluation") {
  Ctx c;
  const dxi_complex rho{0.5, 0};
  const dxi_complex s{0.5, 8 * pi};
  dxi_value v;
  REQUIRE(dxi_eval(c.p, DXI_FAMILY_XI, &rho, 1, &s, 0, &v) == DXI_OK);
  CHECK(std::isfinite(v.value.re));
  CHECK(v.evaluations > 0);
  // Xi(s) - Xi(1 - s) vanishes at this telescope root.
  const dxi_complex s2{0.5, -8 * pi};
  dxi_value w;
  REQUIRE(dxi_eval(c.p, DXI_FAMILY_XI, &rho, 1, &s2, 0, &w) == DXI_OK);
  CHECK(std::hypot(v.value.re - w.value.re, v.value.im - w.value.im) < 1e-12);

  const dxi_complex bad{-1, 0}, one{1, 0};
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI, &bad, 1, &one, 0, &v) == DXI_ERR_DOMAIN);

  const dxi_complex m2[4] = {{1, 0}, {0.2, 0}, {0.2, 0}, {1, 0}};
  const dxi_complex ss[2] = {{1, 0}, {2, 0}};
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI_D, m2, 2, ss, 0, &v) == DXI_OK);
  CHECK(dxi_eval(c.p, DXI_FAMILY_JENSEN, m2, 2, ss, 0, &v) == DXI_OK);
  const dxi_complex asym[4] = {{1, 0}, {0.2, 0}, {0.3, 0}, {1, 0}};
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI_D, asym, 2, ss, 0, &v) == DXI_ERR_DOMAIN);
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI_M, &rho, 1, &one, 2, &v) == DXI_OK);
  CHECK(dxi_eval(c.p, DXI_FAMILY_XI_TILDE, &rho, 1, &one, 0, &v) == DXI_OK);
}

TEST_CASE("verification through JSON") {
  Ctx c;
  dxi_status st;
  int pass = -1;
  json r = verify(c.p, {{"id", "telescope"}, {"rho", 0.5}, {"s", {2, 3}}, {"extras", {{"m", 0}}}}, &st, &pass);
  CHECK(st == DXI_OK);
  CHECK(pass == 1);
  CHECK(r["pass"] == true);
  CHECK(r["abs_residual"].get<double>() < 1e-9);

  r = verify(c.p, {{"id", "telescope"}, {"rho", 0.5}, {"s", {2, 3}}, {"tol", 1e-30}}, &st, &pass);
  CHECK(st == DXI_OK);
  CHECK(pass == 0);

  r = verify(c.p, {{"id", "result3d"}, {"seed", 7}}, &st, &pass);
  CHECK(st == DXI_OK);
  CHECK(pass == 1);
  CHECK(r["params"]["seed"] == 7);

  r = verify(c.p, {{"id", "fun1"}, {"rho", {{1, 0.2}, {0.2, 0.8}}}, {"s", {{1, 1}, 0.5}}}, &st, &pass);
  CHECK(st == DXI_OK);
  CHECK(pass == 1);

  char* csv = nullptr;
  REQUIRE(dxi_report_csv(r.dump().c_str(), &csv) == DXI_OK);
  CHECK(std::string(csv).rfind("fun1,", 0) == 0);
  dxi_string_free(csv);

  verify(c.p, {{"id", "nope"}, {"rho", 1}, {"s", 1}}, &st, &pass);
  CHECK(st == DXI_ERR_PARSE);
  char* out = nullptr;
  CHECK(dxi_verify_json(c.p, "{not json", &out, &pass) == DXI_ERR_PARSE);
  CHECK(out == nullptr);
  verify(c.p, {{"id", "fun1"}, {"rho", {{1, 2}, {2, 1}}}, {"s", {0.5, 0.5}}}, &st, &pass);
  CHECK(st == DXI_ERR_DOMAIN);
}

TEST_CASE("non-convergence returns the partial report") {
  Ctx c;
  REQUIRE(dxi_context_set_max_panels(c.p, 1) == DXI_OK);
  dxi_status st;
  int pass = -1;
  const json r = verify(c.p, {{"id", "telescope"}, {"rho", 0.5}, {"s", {2, 3}}}, &st, &pass);
  CHECK(st == DXI_ERR_NONCONVERGENCE);
  CHECK(pass == 0);
  REQUIRE(r.is_object());
  CHECK(r["pass"] == false);
  REQUIRE(dxi_context_set_max_panels(c.p, 0) == DXI_OK);
  verify(c.p, {{"id", "telescope"}, {"rho", 0.5}, {"s", {2, 3}}}, &st, &pass);
  CHECK(st == DXI_OK);
}

TEST_CASE("candidate and critical-line zeros") {
  Ctx c;
  const dxi_complex rho{0.5, 0};
  dxi_zero_row* rows = nullptr;
  size_t n = 0;
  REQUIRE(dxi_candidate_zeros(c.p, "telescope", &rho, 1, 0, -1, 1, &rows, &n) == DXI_OK);
  REQUIRE(n == 3);
  CHECK(std::abs(rows[2].s.im - rows[1].s.im - 8 * pi) < 1e-12);
  for (size_t i = 0; i < n; ++i) CHECK(rows[i].residual < 1e-8);
  dxi_zero_rows_free(rows);
  CHECK(dxi_candidate_zeros(c.p, "bogus", &rho, 1, 0, 0, 1, &rows, &n) == DXI_ERR_PARSE);
  const dxi_complex r2[4] = {{0.1, 0}, {0.01, 0}, {0.01, 0}, {0.1, 0}};
  REQUIRE(dxi_candidate_zeros(c.p, "funcor1", r2, 2, 0, 0, 0, &rows, &n) == DXI_OK);
  CHECK(n == 2);
  for (size_t i = 0; i < n; ++i) CHECK(rows[i].residual < 1e-7);
  dxi_zero_rows_free(rows);

  double* ys = nullptr;
  double used = 0;
  REQUIRE(dxi_critical_zeros(c.p, 0.1, -1, 30.0, 400, &ys, &n, &used) == DXI_OK);
  CHECK(used == doctest::Approx(std::sqrt(1.6 * std::log(1e10))));
  REQUIRE(n == 1);
  CHECK(ys[0] == doctest::Approx(1.6 * pi).epsilon(1e-9));
  dxi_doubles_free(ys);
  REQUIRE(dxi_critical_zeros(c.p, 0.1, 1, 30.0, 400, &ys, &n, &used) == DXI_OK);
  CHECK(used > 20);
  REQUIRE(n >= 2);
  CHECK(ys[1] == doctest::Approx(14.7147).epsilon(1e-5));
  dxi_doubles_free(ys);
  CHECK(dxi_critical_zeros(c.p, 0.1, 0, 30.0, 400, &ys, &n, &used) == DXI_ERR_INVALID_ARGUMENT);
  CHECK(dxi_critical_zeros(c.p, -0.1, 1, 30.0, 400, &ys, &n, &used) == DXI_ERR_DOMAIN);
}

TEST_CASE("decomposition") {
  Ctx c;
  dxi_decomposition d;
  REQUIRE(dxi_decompose(c.p, {1, 0}, {0.5, 0}, &d) == DXI_OK);
  CHECK(d.integral_part.re == 0.0);
  CHECK(d.integral_part.im == 0.0);
  CHECK(std::abs(d.total.re - d.cosh_coeff.re) < 1e-15);
  REQUIRE(dxi_decompose(c.p, {0.5, 0}, {1.2, 0.7}, &d) == DXI_OK);
  CHECK(std::hypot(d.total.re - d.target.re, d.total.im - d.target.im) < 1e-9);
  CHECK(std::hypot(d.tilde_total.re - d.tilde_target.re, d.tilde_total.im - d.tilde_target.im) < 1e-8);
}
