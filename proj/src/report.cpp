#include "dxi/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace dxi {

namespace {

using nlohmann::json;

json real_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double real_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(ErrorCode::Parse, "report: expected a real number");
}

json cplx_json(cplx z) { return json::array({real_json(z.real()), real_json(z.imag())}); }

cplx cplx_from(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::Parse, "report: expected [re, im]");
  return {real_from(j[0]), real_from(j[1])};
}

json params_json(const VerificationRequest& q) {
  json rho = json::array();
  for (int i = 0; i < q.rho.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < q.rho.dim(); ++j) row.push_back(cplx_json(q.rho(i, j)));
    rho.push_back(row);
  }
  json s = json::array();
  for (cplx v : q.s) s.push_back(cplx_json(v));
  json extras = json::object();
  for (const auto& [k, v] : q.extras) extras[k] = cplx_json(v);
  json p = {{"rho", rho}, {"s", s}, {"extras", extras}, {"tol", real_json(q.tol)}};
  if (q.seed) p["seed"] = *q.seed;
  if (q.spec) {
    const QuadSpec& sp = *q.spec;
    p["spec"] = {{"abs_tol", sp.abs_tol},
                 {"rel_tol", sp.rel_tol},
                 {"trunc_radius", sp.trunc_radius},
                 {"max_panels", sp.max_panels},
                 {"panel_order", sp.panel_order},
                 {"max_step", sp.max_step}};
  }
  return p;
}

VerificationRequest params_from(IdentityId id, const json& p) {
  VerificationRequest q;
  q.id = id;
  std::vector<std::vector<cplx>> rows;
  for (const auto& row : p.at("rho")) {
    rows.emplace_back();
    for (const auto& v : row) rows.back().push_back(cplx_from(v));
  }
  q.rho = RhoMatrix::from_rows(rows);
  for (const auto& v : p.at("s")) q.s.push_back(cplx_from(v));
  for (const auto& [k, v] : p.at("extras").items()) q.extras[k] = cplx_from(v);
  q.tol = real_from(p.at("tol"));
  if (p.contains("seed")) q.seed = p["seed"].get<std::uint64_t>();
  if (p.contains("spec")) {
    const json& sp = p["spec"];
    QuadSpec s;
    s.abs_tol = sp.at("abs_tol").get<double>();
    s.rel_tol = sp.at("rel_tol").get<double>();
    s.trunc_radius = sp.at("trunc_radius").get<std::array<double, 3>>();
    s.max_panels = sp.at("max_panels").get<int>();
    s.panel_order = sp.at("panel_order").get<int>();
    s.max_step = sp.at("max_step").get<double>();
    q.spec = s;
  }
  return q;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string params_hash(const VerificationRequest& req) {
  const std::string text = params_json(req).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string report_to_json(const VerificationReport& r, int indent) {
  json aux = json::array();
  for (const auto& a : r.aux) aux.push_back({{"name", a.name}, {"value", cplx_json(a.value)}});
  json j = {{"id", std::string(identity_name(r.request.id))},
            {"params", params_json(r.request)},
            {"params_hash", params_hash(r.request)},
            {"lhs", cplx_json(r.lhs)},
            {"rhs", cplx_json(r.rhs)},
            {"abs_residual", real_json(r.abs_residual)},
            {"rel_residual", real_json(r.rel_residual)},
            {"tolerance", real_json(r.tolerance)},
            {"pass", r.pass},
            {"evaluations", r.evaluations},
            {"precision_warning", r.precision_warning},
            {"aux", aux}};
  return j.dump(indent);
}

VerificationReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    VerificationReport r;
    r.request = params_from(parse_identity(j.at("id").get<std::string>()), j.at("params"));
    r.lhs = cplx_from(j.at("lhs"));
    r.rhs = cplx_from(j.at("rhs"));
    r.abs_residual = real_from(j.at("abs_residual"));
    r.rel_residual = real_from(j.at("rel_residual"));
    r.tolerance = real_from(j.at("tolerance"));
    r.pass = j.at("pass").get<bool>();
    r.evaluations = j.at("evaluations").get<long long>();
    r.precision_warning = j.at("precision_warning").get<bool>();
    for (const auto& a : j.at("aux"))
      r.aux.push_back({a.at("name").get<std::string>(), cplx_from(a.at("value"))});
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("report: ") + e.what());
  }
}

std::string report_csv_header() { return "id,params_hash,abs_residual,rel_residual,pass"; }

std::string report_csv_row(const VerificationReport& r) {
  return std::string(identity_name(r.request.id)) + "," + params_hash(r.request) + "," +
         format_real(r.abs_residual) + "," + format_real(r.rel_residual) + "," +
         (r.pass ? "true" : "false");
}

}  // namespace dxi
