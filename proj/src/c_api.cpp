#include "dxi/dxi.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "dxi/funceq.hpp"
#include "dxi/ode.hpp"
#include "dxi/report.hpp"
#include "dxi/xi_multi.hpp"
#include "json.hpp"

struct dxi_context {
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<int> max_panels;

  dxi::QuadSpec spec_for(int d) const {
    dxi::QuadSpec q = dxi::QuadSpec::for_dimension(d);
    if (abs_tol) q.abs_tol = *abs_tol;
    if (rel_tol) q.rel_tol = *rel_tol;
    if (max_panels) q.max_panels = *max_panels;
    return q;
  }
  bool overridden() const { return abs_tol || rel_tol || max_panels; }
};

namespace {

using nlohmann::json;
using dxi::cplx;

thread_local std::string g_error;

struct InvalidArgument {
  std::string msg;
};

dxi_status status_of(dxi::ErrorCode c) {
  switch (c) {
    case dxi::ErrorCode::Domain: return DXI_ERR_DOMAIN;
    case dxi::ErrorCode::UnsupportedOrder: return DXI_ERR_UNSUPPORTED_ORDER;
    case dxi::ErrorCode::NonConvergence: return DXI_ERR_NONCONVERGENCE;
    case dxi::ErrorCode::Singular: return DXI_ERR_SINGULAR;
    case dxi::ErrorCode::Degenerate: return DXI_ERR_DEGENERATE;
    case dxi::ErrorCode::Parse: return DXI_ERR_PARSE;
  }
  return DXI_ERR_INTERNAL;
}

template <class F>
dxi_status guarded(F&& f) {
  g_error.clear();
  try {
    f();
    return DXI_OK;
  } catch (const InvalidArgument& e) {
    g_error = e.msg;
    return DXI_ERR_INVALID_ARGUMENT;
  } catch (const dxi::Error& e) {
    g_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    g_error = std::string("json: ") + e.what();
    return DXI_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return DXI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return DXI_ERR_INTERNAL;
  } catch (...) {
    g_error = "unknown error";
    return DXI_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw InvalidArgument{std::string(what) + " must not be null"};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cplx to_cplx(dxi_complex z) { return {z.re, z.im}; }
dxi_complex from_cplx(cplx z) { return {z.real(), z.imag()}; }

dxi::RhoMatrix rho_from(const dxi_complex* rho, int dim) {
  need(rho, "rho");
  if (dim < 1 || dim > 3) throw InvalidArgument{"dimension must be 1, 2 or 3"};
  std::vector<std::vector<cplx>> rows(dim, std::vector<cplx>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) rows[i][j] = to_cplx(rho[i * dim + j]);
  return dxi::RhoMatrix::from_rows(rows);
}

cplx json_cplx(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  dxi::fail(dxi::ErrorCode::Parse, "expected a number or [re, im], got " + j.dump());
}

dxi::RhoMatrix json_rho(const json& j) {
  // A number or [re, im] is a scalar; an array of arrays holds the rows.
  if (j.is_array() && !j.empty() && j[0].is_array()) {
    std::vector<std::vector<cplx>> rows;
    for (const auto& row : j) {
      if (!row.is_array()) dxi::fail(dxi::ErrorCode::Parse, "rho rows must be arrays");
      rows.emplace_back();
      for (const auto& v : row) rows.back().push_back(json_cplx(v));
    }
    return dxi::RhoMatrix::from_rows(rows);
  }
  return dxi::RhoMatrix::scalar(json_cplx(j));
}

dxi::VerificationRequest request_from(const dxi_context* ctx, const json& j) {
  const dxi::IdentityId id = dxi::parse_identity(j.at("id").get<std::string>());
  dxi::VerificationRequest q;
  if (j.contains("seed") && !j.contains("rho")) {
    q = dxi::random_params(id, j["seed"].get<std::uint64_t>());
  } else {
    q.id = id;
    q.rho = json_rho(j.at("rho"));
    const json& s = j.at("s");
    if (s.is_array() && !(s.size() == 2 && s[0].is_number() && q.rho.dim() == 1)) {
      for (const auto& v : s) q.s.push_back(json_cplx(v));
    } else {
      q.s.push_back(json_cplx(s));
    }
    if (j.contains("seed")) q.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("extras"))
    for (const auto& [k, v] : j["extras"].items()) q.extras[k] = json_cplx(v);
  if (j.contains("tol")) q.tol = j["tol"].get<double>();
  if (ctx->overridden()) q.spec = ctx->spec_for(1);
  return q;
}

dxi::ZeroFamily family_from(const char* name) {
  need(name, "family");
  return dxi::parse_zero_family(name);
}

}  // namespace

extern "C" {

dxi_status dxi_context_create(dxi_context** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto ctx = std::make_unique<dxi_context>();
    if (const char* env = std::getenv("XI_QUAD_TOL"); env && *env) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
        dxi::fail(dxi::ErrorCode::Parse,
                  std::string("XI_QUAD_TOL must be a positive number, got '") + env + "'");
      ctx->abs_tol = v;
    }
    *out = ctx.release();
  });
}

void dxi_context_destroy(dxi_context* ctx) { delete ctx; }

dxi_status dxi_context_set_abs_tol(dxi_context* ctx, double abs_tol) {
  return guarded([&] {
    need(ctx, "ctx");
    if (abs_tol == 0.0) {
      ctx->abs_tol.reset();
      return;
    }
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
      dxi::fail(dxi::ErrorCode::Domain, "abs_tol must be positive");
    ctx->abs_tol = abs_tol;
  });
}

dxi_status dxi_context_set_rel_tol(dxi_context* ctx, double rel_tol) {
  return guarded([&] {
    need(ctx, "ctx");
    if (rel_tol == 0.0) {
      ctx->rel_tol.reset();
      return;
    }
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
      dxi::fail(dxi::ErrorCode::Domain, "rel_tol must be positive");
    ctx->rel_tol = rel_tol;
  });
}

dxi_status dxi_context_set_max_panels(dxi_context* ctx, int max_panels) {
  return guarded([&] {
    need(ctx, "ctx");
    if (max_panels == 0) {
      ctx->max_panels.reset();
      return;
    }
    if (max_panels < 0) dxi::fail(dxi::ErrorCode::Domain, "max_panels must be positive");
    ctx->max_panels = max_panels;
  });
}

double dxi_context_abs_tol(const dxi_context* ctx, int d) {
  if (!ctx) return 0.0;
  return ctx->spec_for(d).abs_tol;
}

const char* dxi_last_error(void) { return g_error.c_str(); }

const char* dxi_status_name(dxi_status s) {
  switch (s) {
    case DXI_OK: return "ok";
    case DXI_ERR_DOMAIN: return "domain";
    case DXI_ERR_UNSUPPORTED_ORDER: return "unsupported_order";
    case DXI_ERR_NONCONVERGENCE: return "non_convergence";
    case DXI_ERR_SINGULAR: return "singular";
    case DXI_ERR_DEGENERATE: return "degenerate";
    case DXI_ERR_PARSE: return "parse";
    case DXI_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DXI_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dxi_version(void) { return "0.1.0"; }

void dxi_string_free(char* s) { std::free(s); }

dxi_status dxi_eval(dxi_context* ctx, dxi_family family, const dxi_complex* rho, int dim,
                    const dxi_complex* s, int m, dxi_value* out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(s, "s");
    need(out, "out");
    const dxi::RhoMatrix r = rho_from(rho, dim);
    dxi::XiValue v;
    switch (family) {
      case DXI_FAMILY_XI:
      case DXI_FAMILY_XI_TILDE:
      case DXI_FAMILY_XI_M: {
        if (dim != 1) dxi::fail(dxi::ErrorCode::Domain, "this family takes a scalar rho");
        const cplx r0 = r(0, 0), s0 = to_cplx(s[0]);
        const dxi::QuadSpec spec = ctx->spec_for(1);
        if (family == DXI_FAMILY_XI) v = dxi::xi(r0, s0, spec);
        else if (family == DXI_FAMILY_XI_TILDE) v = dxi::xi_tilde(r0, s0, spec);
        else v = dxi::xi_sum_m(r0, s0, m, spec);
        break;
      }
      case DXI_FAMILY_XI_D:
      case DXI_FAMILY_JENSEN: {
        dxi::MultiXiParams p;
        p.rho = r;
        for (int i = 0; i < dim; ++i) p.s.push_back(to_cplx(s[i]));
        p.variant = family == DXI_FAMILY_JENSEN ? dxi::MultiVariant::Jensen
                                                : dxi::MultiVariant::Theta;
        v = dxi::xi_d(p, ctx->spec_for(dim));
        break;
      }
      default:
        throw InvalidArgument{"unknown family"};
    }
    *out = {from_cplx(v.value), v.quad_error, v.evaluations, v.precision_warning ? 1 : 0};
  });
}

dxi_status dxi_verify_json(dxi_context* ctx, const char* request_json, char** report_json,
                           int* pass) {
  if (report_json) *report_json = nullptr;
  if (pass) *pass = 0;
  std::optional<dxi::VerificationReport> partial;
  const dxi_status st = guarded([&] {
    need(ctx, "ctx");
    need(request_json, "request_json");
    need(report_json, "report_json");
    const dxi::VerificationRequest req = request_from(ctx, json::parse(request_json));
    try {
      const dxi::VerificationReport r = dxi::verify(req);
      *report_json = dup_string(dxi::report_to_json(r));
      if (pass) *pass = r.pass ? 1 : 0;
    } catch (const dxi::NonConvergenceError&) {
      partial = dxi::last_partial_report();
      throw;
    }
  });
  if (st == DXI_ERR_NONCONVERGENCE && partial && report_json) {
    try {
      *report_json = dup_string(dxi::report_to_json(*partial));
    } catch (...) {
    }
  }
  return st;
}

dxi_status dxi_report_csv(const char* report_json, char** csv_row) {
  return guarded([&] {
    need(report_json, "report_json");
    need(csv_row, "csv_row");
    *csv_row = dup_string(dxi::report_csv_row(dxi::report_from_json(report_json)));
  });
}

const char* dxi_report_csv_header(void) {
  static const std::string h = dxi::report_csv_header();
  return h.c_str();
}

int dxi_identity_count(void) { return dxi::kIdentityCount; }

const char* dxi_identity_name(int index) {
  if (index < 0 || index >= dxi::kIdentityCount) return nullptr;
  return dxi::identity_name(dxi::identity_from_index(index)).data();
}

dxi_status dxi_candidate_zeros(dxi_context* ctx, const char* family, const dxi_complex* rho,
                               int dim, int m, int k_lo, int k_hi, dxi_zero_row** rows,
                               size_t* count) {
  return guarded([&] {
    need(ctx, "ctx");
    need(rows, "rows");
    need(count, "count");
    *rows = nullptr;
    *count = 0;
    const dxi::ZeroFamily f = family_from(family);
    const dxi::RhoMatrix r = rho_from(rho, dim);
    const auto roots = dxi::candidate_zeros(f, r, m, k_lo, k_hi);
    const dxi::QuadSpec spec = ctx->spec_for(dim);
    std::vector<dxi_zero_row> out;
    for (const auto& c : roots) {
      const double res = std::abs(dxi::zero_confirmation(f, r, m, c.s, spec));
      out.push_back({from_cplx(c.s), c.k, c.branch, res});
    }
    auto* buf = static_cast<dxi_zero_row*>(std::malloc(sizeof(dxi_zero_row) * (out.size() + 1)));
    if (!buf) throw std::bad_alloc();
    std::copy(out.begin(), out.end(), buf);
    *rows = buf;
    *count = out.size();
  });
}

void dxi_zero_rows_free(dxi_zero_row* rows) { std::free(rows); }

dxi_status dxi_critical_zeros(dxi_context* ctx, double rho, int sign, double y_max, int grid,
                              double** ys, size_t* count, double* y_used) {
  return guarded([&] {
    need(ctx, "ctx");
    need(ys, "ys");
    need(count, "count");
    *ys = nullptr;
    *count = 0;
    if (sign != 1 && sign != -1) throw InvalidArgument{"sign must be +1 or -1"};
    if (!(y_max > 0.0) || grid < 1) dxi::fail(dxi::ErrorCode::Domain, "need y_max > 0, grid >= 1");
    dxi::require_rho(rho, "critical_zeros");
    dxi::MellinEvaluator ev(dxi::ThetaOperator::plain(), rho, 0, 0.5, ctx->spec_for(1));
    // Both combinations are bounded by 2|Xi(1/2 + iy)|; stop once that stays
    // below 1e-10 of its value at y = 0 over a window of length 2 (a single
    // small sample may just be a zero of Xi itself).
    const double floor = 1e-10 * std::abs(ev(0.25).value);
    const double step = y_max / grid;
    double reach = y_max, quiet_from = -1.0;
    for (int i = 1; i <= grid; ++i) {
      const double y = i * step;
      if (std::abs(ev(cplx(0.25, y / 2.0)).value) >= floor) {
        quiet_from = -1.0;
      } else if (quiet_from < 0.0) {
        quiet_from = y;
      } else if (y - quiet_from >= 2.0) {
        reach = quiet_from;
        break;
      }
    }
    // The difference is the telescope closed form, whose envelope is the
    // Gaussian e^{-y^2/16rho}: past that point only round-off changes sign.
    if (sign < 0) reach = std::min(reach, std::sqrt(16.0 * rho * std::log(1e10)));
    if (y_used) *y_used = reach;
    auto f = [&](cplx s) { return ev(s / 2.0).value + double(sign) * ev((1.0 - s) / 2.0).value; };
    std::vector<double> out;
    const int cells = std::max(1, static_cast<int>(std::ceil(grid * reach / y_max)));
    for (cplx z : dxi::zero_scan(f, 0.5, cplx(0.0, 1.0), reach, cells))
      if (z.imag() > 0.0) out.push_back(z.imag());
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * (out.size() + 1)));
    if (!buf) throw std::bad_alloc();
    std::copy(out.begin(), out.end(), buf);
    *ys = buf;
    *count = out.size();
  });
}

void dxi_doubles_free(double* v) { std::free(v); }

dxi_status dxi_decompose(dxi_context* ctx, dxi_complex rho, dxi_complex s,
                         dxi_decomposition* out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    const cplx r = to_cplx(rho), z = to_cplx(s);
    const dxi::QuadSpec spec = ctx->spec_for(1);
    const dxi::DecompositionResult d = dxi::canonical_decomposition(r, z, spec);
    const dxi::DecompositionResult t = dxi::tilde_decomposition(r, z, spec);
    const dxi::APm a = dxi::a_pm(r, z, spec);
    out->sinh_coeff = from_cplx(d.sinh_coeff);
    out->cosh_coeff = from_cplx(d.cosh_coeff);
    out->integral_part = from_cplx(d.integral_part);
    out->total = from_cplx(d.total);
    out->target = from_cplx(dxi::canonical_target(r, z, spec).value);
    out->a_plus = from_cplx(a.plus);
    out->a_minus = from_cplx(a.minus);
    out->tilde_total = from_cplx(t.total);
    out->tilde_target = from_cplx(dxi::tilde_target(r, z, spec).value);
  });
}

}  // extern "C"
