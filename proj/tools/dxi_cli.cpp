// dxi: command-line front end over the C API.
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dxi/dxi.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(dxi_status st) {
  if (st != DXI_OK)
    throw ApiError(std::string(dxi_status_name(st)) + ": " + dxi_last_error());
}

std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}

// One term of a complex literal: [number][pi|π][*][i|j]
dxi_complex parse_term(const std::string& t, const std::string& whole) {
  std::string rest = t;
  double coeff = 1.0;
  bool have_number = false;
  if (!rest.empty() && (std::isdigit(static_cast<unsigned char>(rest[0])) || rest[0] == '.')) {
    size_t used = 0;
    try {
      coeff = std::stod(rest, &used);
    } catch (...) {
      throw UsageError("cannot parse complex number '" + whole + "'");
    }
    rest = rest.substr(used);
    have_number = true;
  }
  if (!rest.empty() && rest[0] == '*') rest = rest.substr(1);
  bool have_pi = false;
  if (rest.rfind("π", 0) == 0) {
    rest = rest.substr(std::string("π").size());
    have_pi = true;
  } else if (rest.rfind("pi", 0) == 0) {
    rest = rest.substr(2);
    have_pi = true;
  }
  if (have_pi) coeff *= std::numbers::pi;
  if (!rest.empty() && rest[0] == '*') rest = rest.substr(1);
  bool imag = false;
  if (rest == "i" || rest == "j") {
    imag = true;
    rest.clear();
  }
  if (!rest.empty() || (!have_number && !have_pi && !imag))
    throw UsageError("cannot parse complex number '" + whole + "'");
  return imag ? dxi_complex{0.0, coeff} : dxi_complex{coeff, 0.0};
}

// a+bi, with optional pi / π factors: "0.5+8πi", "-i", "2", "1e-3-2.5i".
dxi_complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw UsageError("empty complex number");
  dxi_complex out{0.0, 0.0};
  size_t pos = 0;
  while (pos < s.size()) {
    double sign = 1.0;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1.0 : 1.0;
      ++pos;
    }
    size_t end = pos;
    while (end < s.size()) {
      const char c = s[end];
      const bool exp_sign = (c == '+' || c == '-') && end > pos &&
                            (s[end - 1] == 'e' || s[end - 1] == 'E') && end >= 2 &&
                            (std::isdigit(static_cast<unsigned char>(s[end - 2])) || s[end - 2] == '.');
      if ((c == '+' || c == '-') && !exp_sign) break;
      ++end;
    }
    if (end == pos) throw UsageError("cannot parse complex number '" + text + "'");
    const dxi_complex t = parse_term(s.substr(pos, end - pos), text);
    out.re += sign * t.re;
    out.im += sign * t.im;
    pos = end;
  }
  if (!std::isfinite(out.re) || !std::isfinite(out.im))
    throw UsageError("non-finite complex number '" + text + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::vector<dxi_complex> parse_complex_list(const std::string& s) {
  std::vector<dxi_complex> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_complex(p));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// "1,0.2;0.2,1" -> row-major entries and the dimension.
std::vector<dxi_complex> parse_matrix(const std::string& s, int* dim) {
  const auto rows = split(s, ';');
  const int d = static_cast<int>(rows.size());
  std::vector<dxi_complex> out;
  for (const auto& r : rows) {
    const auto row = parse_complex_list(r);
    if (static_cast<int>(row.size()) != d) throw UsageError("rho matrix must be square");
    out.insert(out.end(), row.begin(), row.end());
  }
  *dim = d;
  return out;
}

struct Range {
  double lo, hi;
  int n;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

// lo:hi:n, n points including both ends.
Range parse_range(const std::string& s) {
  const auto p = split(s, ':');
  if (p.size() != 3) throw UsageError("range must be lo:hi:count, got '" + s + "'");
  try {
    Range r{std::stod(p[0]), std::stod(p[1]), std::stoi(p[2])};
    if (r.n < 1) throw UsageError("range count must be positive");
    return r;
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse range '" + s + "'");
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cj(dxi_complex z) { return json::array({z.re, z.im}); }

struct Context {
  dxi_context* ctx = nullptr;
  Context() { check(dxi_context_create(&ctx)); }
  ~Context() { dxi_context_destroy(ctx); }
};

struct Options {
  std::string format;
  std::string out_path;
  std::optional<double> tol;
  std::optional<double> quad_tol;
  std::optional<double> quad_rel_tol;
  std::optional<int> max_panels;

  // rho / s
  std::string rho = "";
  std::string rho_matrix = "";
  std::string s = "";
  int m = 0;

  // eval / grid
  std::string family = "";

  // verify
  std::string id;
  std::optional<int> k;
  std::optional<std::string> gamma, alpha, s2;
  std::optional<int> n, branch, n_prime;
  std::optional<unsigned long long> seed;

  // zeros
  int count = 5;
  int k_start = 0;
  bool interlacing = false;
  double y_max = 60.0;
  int scan_grid = 400;

  // grid
  std::string re_range, im_range;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void apply_quad(const Options& o, Context& c) {
  if (o.quad_tol) check(dxi_context_set_abs_tol(c.ctx, *o.quad_tol));
  if (o.quad_rel_tol) check(dxi_context_set_rel_tol(c.ctx, *o.quad_rel_tol));
  if (o.max_panels) check(dxi_context_set_max_panels(c.ctx, *o.max_panels));
}

std::string format_or(const Options& o, const char* fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

std::vector<dxi_complex> rho_entries(const Options& o, int* dim) {
  if (!o.rho_matrix.empty()) {
    if (!o.rho.empty()) throw UsageError("give either --rho or --rho-matrix");
    return parse_matrix(o.rho_matrix, dim);
  }
  if (o.rho.empty()) throw UsageError("--rho or --rho-matrix is required");
  *dim = 1;
  return {parse_complex(o.rho)};
}

dxi_family parse_family(const std::string& f) {
  if (f == "xi") return DXI_FAMILY_XI;
  if (f == "xi_tilde") return DXI_FAMILY_XI_TILDE;
  if (f == "xi_m") return DXI_FAMILY_XI_M;
  if (f == "xi_d") return DXI_FAMILY_XI_D;
  if (f == "jensen") return DXI_FAMILY_JENSEN;
  throw UsageError("unknown family '" + f + "' (xi, xi_tilde, xi_m, xi_d, jensen)");
}

int cmd_eval(const Options& o) {
  Context c;
  apply_quad(o, c);
  const std::string fmt = format_or(o, "json");
  int dim = 1;
  const auto rho = rho_entries(o, &dim);
  if (o.s.empty()) throw UsageError("--s is required");
  const auto s = parse_complex_list(o.s);
  const std::string family = o.family.empty() ? (dim == 1 ? "xi" : "xi_d") : o.family;
  const dxi_family fam = parse_family(family);
  if (static_cast<int>(s.size()) != dim)
    throw UsageError("--s needs " + std::to_string(dim) + " entries");
  dxi_value v;
  check(dxi_eval(c.ctx, fam, rho.data(), dim, s.data(), o.m, &v));
  Output out(o.out_path);
  if (fmt == "json") {
    json j = {{"family", family},
              {"value", cj(v.value)},
              {"quad_error", v.quad_error},
              {"evaluations", v.evaluations},
              {"precision_warning", v.precision_warning != 0}};
    out.os() << j.dump() << "\n";
  } else {
    out.os() << "family,value_re,value_im,quad_error,evaluations,precision_warning\n"
             << family << "," << num(v.value.re) << "," << num(v.value.im) << ","
             << num(v.quad_error) << "," << v.evaluations << ","
             << (v.precision_warning ? "true" : "false") << "\n";
  }
  return kExitPass;
}

int cmd_verify(const Options& o) {
  Context c;
  apply_quad(o, c);
  const std::string fmt = format_or(o, "json");
  json req = {{"id", o.id}};
  const bool drawn = o.seed && o.rho.empty() && o.rho_matrix.empty();
  if (o.seed) req["seed"] = *o.seed;
  if (!drawn) {
    int dim = 1;
    const auto rho = rho_entries(o, &dim);
    json rows = json::array();
    for (int i = 0; i < dim; ++i) {
      json row = json::array();
      for (int j = 0; j < dim; ++j) row.push_back(cj(rho[i * dim + j]));
      rows.push_back(row);
    }
    req["rho"] = rows;
    if (o.s.empty()) throw UsageError("--s is required (or --seed for a random draw)");
    json s = json::array();
    for (const auto& z : parse_complex_list(o.s)) s.push_back(cj(z));
    req["s"] = s;
  }
  json extras = json::object();
  extras["m"] = o.m;
  if (o.k) {
    if (*o.k < 1) throw UsageError("--k is 1-based");
    extras["k"] = *o.k - 1;
  }
  if (o.gamma) extras["gamma"] = cj(parse_complex(*o.gamma));
  if (o.alpha) extras["alpha"] = cj(parse_complex(*o.alpha));
  if (o.s2) extras["s2"] = cj(parse_complex(*o.s2));
  if (o.n) extras["n"] = *o.n;
  if (o.branch) extras["branch"] = *o.branch;
  if (o.n_prime) extras["n_prime"] = *o.n_prime;
  if (!drawn || extras.size() > 1) req["extras"] = extras;
  if (o.tol) req["tol"] = *o.tol;

  char* report = nullptr;
  int pass = 0;
  const dxi_status st = dxi_verify_json(c.ctx, req.dump().c_str(), &report, &pass);
  const std::string msg = dxi_last_error();
  std::string text = report ? report : "";
  dxi_string_free(report);
  if (!text.empty()) {
    Output out(o.out_path);
    if (fmt == "json") {
      out.os() << text << "\n";
    } else {
      char* row = nullptr;
      check(dxi_report_csv(text.c_str(), &row));
      out.os() << dxi_report_csv_header() << "\n" << row << "\n";
      dxi_string_free(row);
    }
  }
  if (st != DXI_OK) throw ApiError(std::string(dxi_status_name(st)) + ": " + msg);
  return pass ? kExitPass : kExitFail;
}

std::vector<double> critical(Context& c, double rho, int sign, const Options& o, double* reach) {
  double* ys = nullptr;
  size_t n = 0;
  check(dxi_critical_zeros(c.ctx, rho, sign, o.y_max, o.scan_grid, &ys, &n, reach));
  std::vector<double> out(ys, ys + n);
  dxi_doubles_free(ys);
  return out;
}

int cmd_zeros(const Options& o) {
  Context c;
  apply_quad(o, c);
  const std::string fmt = format_or(o, "csv");
  int dim = 1;
  const auto rho = rho_entries(o, &dim);
  Output out(o.out_path);
  if (o.interlacing) {
    if (dim != 1 || rho[0].im != 0.0) throw UsageError("--interlacing needs a real scalar --rho");
    double reach_plus = 0.0, reach_minus = 0.0;
    const auto plus = critical(c, rho[0].re, +1, o, &reach_plus);
    const auto minus = critical(c, rho[0].re, -1, o, &reach_minus);
    // The two kinds must alternate where both were resolved.
    const double common = std::min(reach_plus, reach_minus);
    std::vector<std::pair<double, int>> all;
    for (double y : plus) all.push_back({y, +1});
    for (double y : minus) all.push_back({y, -1});
    std::sort(all.begin(), all.end());
    bool alternate = true;
    for (size_t i = 1; i < all.size() && all[i].first <= common; ++i)
      alternate = alternate && all[i].second != all[i - 1].second;
    if (fmt == "json") {
      out.os() << json{{"rho", rho[0].re},     {"y_scanned_plus", reach_plus},
                       {"y_scanned_minus", reach_minus}, {"plus", plus},
                       {"minus", minus},       {"interlaced_below", common},
                       {"interlaced", alternate}}
                      .dump()
               << "\n";
    } else {
      out.os() << "kind,y\n";
      for (const auto& [y, k] : all) out.os() << (k > 0 ? "plus" : "minus") << "," << num(y) << "\n";
      out.os() << "# y_scanned_plus=" << num(reach_plus) << " y_scanned_minus=" << num(reach_minus)
               << " interlaced_below=" << num(common) << " interlaced=" << (alternate ? "true" : "false")
               << "\n";
    }
    return kExitPass;
  }
  const std::string family = o.family.empty() ? "telescope" : o.family;
  if (o.count < 1) throw UsageError("--count must be positive");
  dxi_zero_row* rows = nullptr;
  size_t n = 0;
  check(dxi_candidate_zeros(c.ctx, family.c_str(), rho.data(), dim, o.m, o.k_start,
                            o.k_start + o.count - 1, &rows, &n));
  std::vector<dxi_zero_row> v(rows, rows + n);
  dxi_zero_rows_free(rows);
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : v)
      arr.push_back({{"k", r.k}, {"branch", r.branch}, {"s", cj(r.s)}, {"residual", r.residual}});
    out.os() << json{{"family", family}, {"m", o.m}, {"roots", arr}}.dump() << "\n";
  } else {
    out.os() << "family,k,branch,re,im,residual\n";
    for (const auto& r : v)
      out.os() << family << "," << r.k << "," << r.branch << "," << num(r.s.re) << ","
               << num(r.s.im) << "," << num(r.residual) << "\n";
  }
  return kExitPass;
}

int cmd_decompose(const Options& o) {
  Context c;
  apply_quad(o, c);
  const std::string fmt = format_or(o, "json");
  if (o.rho.empty() || o.s.empty()) throw UsageError("--rho and --s are required");
  const dxi_complex rho = parse_complex(o.rho), s = parse_complex(o.s);
  dxi_decomposition d;
  check(dxi_decompose(c.ctx, rho, s, &d));
  const std::vector<std::pair<std::string, dxi_complex>> fields = {
      {"sinh_coeff", d.sinh_coeff}, {"cosh_coeff", d.cosh_coeff},
      {"integral_part", d.integral_part}, {"total", d.total},
      {"target", d.target}, {"a_plus", d.a_plus},
      {"a_minus", d.a_minus}, {"tilde_total", d.tilde_total},
      {"tilde_target", d.tilde_target}};
  Output out(o.out_path);
  if (fmt == "json") {
    json j = {{"rho", cj(rho)}, {"s", cj(s)}};
    for (const auto& [k, v] : fields) j[k] = cj(v);
    out.os() << j.dump() << "\n";
  } else {
    out.os() << "quantity,re,im\n";
    for (const auto& [k, v] : fields) out.os() << k << "," << num(v.re) << "," << num(v.im) << "\n";
  }
  return kExitPass;
}

int cmd_grid(const Options& o) {
  Context c;
  apply_quad(o, c);
  const std::string fmt = format_or(o, "csv");
  if (o.rho.empty()) throw UsageError("--rho is required");
  const dxi_complex rho = parse_complex(o.rho);
  const Range re = parse_range(o.re_range), im = parse_range(o.im_range);
  const std::string family = o.family.empty() ? "xi" : o.family;
  const dxi_family fam = parse_family(family);
  if (fam == DXI_FAMILY_XI_D || fam == DXI_FAMILY_JENSEN)
    throw UsageError("grid supports the scalar families xi, xi_tilde, xi_m");
  Output out(o.out_path);
  json rows = json::array();
  if (fmt == "csv") out.os() << "re,im,value_re,value_im,quad_error\n";
  for (int i = 0; i < re.n; ++i) {
    for (int j = 0; j < im.n; ++j) {
      const dxi_complex s{re.at(i), im.at(j)};
      dxi_value v;
      check(dxi_eval(c.ctx, fam, &rho, 1, &s, o.m, &v));
      if (fmt == "csv") {
        out.os() << num(s.re) << "," << num(s.im) << "," << num(v.value.re) << ","
                 << num(v.value.im) << "," << num(v.quad_error) << "\n";
      } else {
        rows.push_back({{"s", cj(s)}, {"value", cj(v.value)}, {"quad_error", v.quad_error}});
      }
    }
  }
  if (fmt == "json") out.os() << json{{"family", family}, {"rho", cj(rho)}, {"rows", rows}}.dump() << "\n";
  return kExitPass;
}

void add_rho_s(CLI::App* sub, Options& o) {
  sub->add_option("--rho", o.rho, "scalar rho (complex, e.g. 0.5 or 1+0.1i)");
  sub->add_option("--rho-matrix", o.rho_matrix, "rows separated by ';', entries by ','");
  sub->add_option("--s", o.s, "argument(s), comma separated; 'pi'/'π' allowed, e.g. 0.5+8πi");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-deformed Xi functions: evaluation, identity checks, zeros, decompositions"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "json or csv");
  app.add_option("--out", o.out_path, "write output to this file");
  app.add_option("--tol", o.tol, "verification tolerance")->check(CLI::PositiveNumber);
  app.add_option("--quad-tol", o.quad_tol, "absolute quadrature tolerance (overrides XI_QUAD_TOL)")
      ->check(CLI::PositiveNumber);
  app.add_option("--quad-rel-tol", o.quad_rel_tol, "relative quadrature tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-panels", o.max_panels, "quadrature panel budget")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "evaluate a family member");
  add_rho_s(eval, o);
  eval->add_option("--family", o.family, "xi, xi_tilde, xi_m, xi_d, jensen");
  eval->add_option("--m", o.m, "m for xi_m")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "check an identity");
  verify->add_option("id", o.id, "identity name")->required();
  add_rho_s(verify, o);
  verify->add_option("--m", o.m, "telescope order")->check(CLI::NonNegativeNumber);
  verify->add_option("--k", o.k, "row/column to flip (1-based)");
  verify->add_option("--gamma", o.gamma, "gamma");
  verify->add_option("--alpha", o.alpha, "alpha");
  verify->add_option("--s2", o.s2, "s2 (rho12_roots)");
  verify->add_option("--n", o.n, "n");
  verify->add_option("--branch", o.branch, "+1 or -1");
  verify->add_option("--n-prime", o.n_prime, "n'");
  verify->add_option("--seed", o.seed, "draw hypothesis-satisfying parameters");

  auto* zeros = app.add_subcommand("zeros", "closed-form roots with confirmation residuals");
  add_rho_s(zeros, o);
  zeros->add_option("--family", o.family, "telescope, tilde, funcor1, funcor2");
  zeros->add_option("--m", o.m, "order m")->check(CLI::NonNegativeNumber);
  zeros->add_option("--count", o.count, "number of roots");
  zeros->add_option("--k-start", o.k_start, "first root index");
  zeros->add_flag("--interlacing", o.interlacing,
                  "scan Xi(1/2+iy) +- Xi(1/2-iy) and report whether the zeros alternate");
  zeros->add_option("--ymax", o.y_max, "scan length for --interlacing")->check(CLI::PositiveNumber);
  zeros->add_option("--scan-grid", o.scan_grid, "grid cells per half-line")
      ->check(CLI::PositiveNumber);

  auto* decompose = app.add_subcommand("decompose", "canonical sinh/cosh/integral split");
  add_rho_s(decompose, o);

  auto* grid = app.add_subcommand("grid", "values over a rectangle");
  grid->add_option("--rho", o.rho, "scalar rho")->required();
  grid->add_option("--re", o.re_range, "lo:hi:count")->required();
  grid->add_option("--im", o.im_range, "lo:hi:count")->required();
  grid->add_option("--family", o.family, "xi, xi_tilde, xi_m");
  grid->add_option("--m", o.m, "m for xi_m")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*eval) return cmd_eval(o);
    if (*verify) return cmd_verify(o);
    if (*zeros) return cmd_zeros(o);
    if (*decompose) return cmd_decompose(o);
    if (*grid) return cmd_grid(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
