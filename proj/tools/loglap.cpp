// loglap: kernel tables, operator application and the verification suite.
//
// Exit codes: 0 ok, 1 failed verification (or internal error), 2 bad arguments,
// 3 quadrature did not converge.

#include <algorithm>
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
#include "json.hpp"
#include "loglap/errors.hpp"
#include "loglap/euclid.hpp"
#include "loglap/hyperbolic.hpp"
#include "loglap/io.hpp"
#include "loglap/parallel.hpp"
#include "loglap/specfun.hpp"
#include "loglap/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace loglap;

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNonConvergence = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

// CSV to path (sidecar at path.json) or to stdout without a path.
void emit(const std::optional<std::string>& out, const std::string& csv, const ordered_json& meta) {
  if (out) {
    write_file(*out, csv);
    write_file(*out + ".json", meta.dump(2) + "\n");
  } else {
    std::cout << csv;
  }
}

ordered_json tolerances(const quad::QuadratureConfig& c) {
  return {{"abs_tol", c.abs_tol}, {"rel_tol", c.rel_tol}, {"max_subdivisions", c.max_subdivisions}};
}

// ---- kernel ----

struct KernelArgs {
  std::string space = "hyperbolic";
  std::string kind = "log2";
  int n = 3;
  std::optional<double> s;
  std::optional<double> t;
  double r_min = 0.1;
  double r_max = 8.0;
  int points = 64;
  std::string spacing = "linear";
  std::optional<std::string> route;
  std::optional<std::string> out;
};

std::vector<double> make_grid(const KernelArgs& a) {
  if (!(a.r_min > 0.0) || !(a.r_max > a.r_min) || a.points < 2) throw UsageError("need 0 < r-min < r-max and points >= 2");
  std::vector<double> g(a.points);
  for (int i = 0; i < a.points; ++i) {
    const double u = double(i) / (a.points - 1);
    g[i] = a.spacing == "log" ? a.r_min * std::pow(a.r_max / a.r_min, u) : a.r_min + (a.r_max - a.r_min) * u;
  }
  g.back() = a.r_max;
  return g;
}

hyperbolic::KernelKind parse_kind(const std::string& k) {
  if (k == "heat") return hyperbolic::KernelKind::heat;
  if (k == "frac") return hyperbolic::KernelKind::frac;
  if (k == "log1") return hyperbolic::KernelKind::log1;
  return hyperbolic::KernelKind::log2;
}

hyperbolic::KernelRoute parse_route(const std::string& r) {
  if (r == "bessel_closed_form") return hyperbolic::KernelRoute::bessel_closed_form;
  if (r == "term_algebra") return hyperbolic::KernelRoute::term_algebra;
  return hyperbolic::KernelRoute::time_quadrature;
}

// Gaussian kernel (4 pi t)^(-n/2) e^(-r^2/4t) and its time integrals, in closed form.
double euclid_kernel(const KernelArgs& a, double r) {
  const double h = 0.5 * a.n;
  const double u = 0.25 * r * r;
  const double base = std::pow(std::numbers::pi * r * r, -h);
  if (a.kind == "heat") return std::pow(4.0 * std::numbers::pi * *a.t, -h) * std::exp(-u / *a.t);
  if (a.kind == "frac") return base * std::pow(u, -*a.s) * specfun::gamma(h + *a.s);
  if (a.kind == "log1") return base * specfun::upper_gamma(h, u);
  return base * specfun::lower_gamma(h, u);
}

int cmd_kernel(const KernelArgs& a) {
  const auto grid = make_grid(a);
  const int workers = parallel::default_workers();
  if (a.kind == "frac" && (!a.s || !(*a.s > 0.0 && *a.s < 1.0))) throw UsageError("frac needs --s in (0,1)");
  if (a.kind == "heat" && (!a.t || !(*a.t > 0.0))) throw UsageError("heat needs --t > 0");
  if (a.kind != "frac" && a.s) throw UsageError("--s only applies to --kind frac");
  if (a.kind != "heat" && a.t) throw UsageError("--t only applies to --kind heat");

  std::ostringstream csv;
  ordered_json meta;
  if (a.space == "euclid") {
    if (a.n < 1 || a.n > 6) throw UsageError("euclid kernels need 1 <= n <= 6");
    if (a.route && *a.route != "closed_form") throw UsageError("euclid kernels have only the closed_form route");
    auto fn = [&](std::size_t i) { return euclid_kernel(a, grid[i]); };
    const auto vals = workers <= 1 ? parallel::map_serial(grid.size(), fn) : parallel::map(grid.size(), fn, workers);
    csv << "r,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) csv << io::format_double(grid[i]) << ',' << io::format_double(vals[i]) << '\n';
    meta["space"] = "euclid";
    meta["kind"] = a.kind;
    meta["n"] = a.n;
    meta["s"] = a.s ? ordered_json(*a.s) : ordered_json(nullptr);
    meta["t"] = a.t ? ordered_json(*a.t) : ordered_json(nullptr);
    meta["route"] = "closed_form";
    meta["points"] = grid.size();
  } else {
    const auto kind = parse_kind(a.kind);
    std::string route = a.route ? *a.route : (a.kind == "heat" ? "term_algebra" : "time_quadrature");
    if (route == "closed_form") throw UsageError("closed_form is the euclid route");
    const auto tab = hyperbolic::build_kernel_table(kind, a.n, a.s, a.t, grid, parse_route(route), {}, workers);
    hyperbolic::write_table_csv(tab, csv);
    meta["space"] = "hyperbolic";
    const auto side = ordered_json::parse(hyperbolic::table_json_sidecar(tab));
    for (const auto& [k, v] : side.items()) meta[k] = v;
  }
  meta["spacing"] = a.spacing;
  emit(a.out, csv.str(), meta);
  return 0;
}

// ---- apply ----

struct ApplyArgs {
  std::string space = "euclid";
  std::string op = "log";
  std::string route = "pointwise";
  std::string fn = "bump";
  int n = 1;
  std::optional<double> s;
  std::vector<double> x;
  std::optional<std::string> points_file;
  std::optional<double> L;
  std::optional<int> N;
  quad::QuadratureConfig cfg;
  std::optional<std::string> out;
};

std::vector<std::vector<double>> read_points(const std::string& path, std::size_t dim) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read points file '" + path + "'");
  std::vector<std::vector<double>> pts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> p;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        p.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw UsageError("bad number '" + cell + "' in points file");
      }
    }
    if (p.size() != dim) throw UsageError("points file rows need " + std::to_string(dim) + " values");
    pts.push_back(std::move(p));
  }
  if (pts.empty()) throw UsageError("points file is empty");
  return pts;
}

int cmd_apply(const ApplyArgs& a) {
  try {
    a.cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const bool hyper = a.space == "hyperbolic";
  const std::size_t dim = hyper ? 1 : static_cast<std::size_t>(a.n);
  if (a.op == "frac" && (!a.s || !(*a.s > 0.0 && *a.s < 1.0))) throw UsageError("frac needs --s in (0,1)");
  if (a.op == "log" && a.s) throw UsageError("--s only applies to --op frac");

  std::vector<std::vector<double>> pts;
  if (a.points_file) {
    if (!a.x.empty()) throw UsageError("give either --x or --points, not both");
    pts = read_points(*a.points_file, dim);
  } else {
    std::vector<double> x = a.x.empty() ? std::vector<double>(dim, 0.0) : a.x;
    if (x.size() != dim) throw UsageError("--x needs " + std::to_string(dim) + " coordinates");
    pts.push_back(x);
  }
  const int workers = parallel::default_workers();
  std::vector<double> vals;
  ordered_json meta{{"space", a.space}, {"op", a.op}, {"route", a.route}, {"fn", a.fn}, {"n", a.n}};
  meta["s"] = a.s ? ordered_json(*a.s) : ordered_json(nullptr);

  if (hyper) {
    if (a.op != "log") throw UsageError("hyperbolic apply supports --op log only");
    if (a.route == "multiplier") throw UsageError("hyperbolic apply has routes pointwise and bochner");
    if (a.fn != "bump" && a.fn != "zero") throw UsageError("unknown hyperbolic function '" + a.fn + "' (bump, zero)");
    const auto f = a.fn == "bump" ? hyperbolic::hyper_bump() : hyperbolic::hyper_zero();
    for (const auto& p : pts)
      if (!(p[0] >= 0.0)) throw UsageError("hyperbolic points are distances >= 0");
    auto ev = [&](std::size_t i) {
      return a.route == "pointwise" ? hyperbolic::log_pointwise_h(a.n, f, pts[i][0], a.cfg)
                                    : hyperbolic::log_bochner_h(a.n, f, pts[i][0], a.cfg);
    };
    vals = workers <= 1 ? parallel::map_serial(pts.size(), ev) : parallel::map(pts.size(), ev, workers);
    meta["tolerances"] = tolerances(a.cfg);
  } else {
    const auto ids = euclid::registry_ids();
    if (std::find(ids.begin(), ids.end(), a.fn) == ids.end()) throw UsageError("unknown function '" + a.fn + "'");
    if (a.n < 1 || a.n > 3) throw UsageError("euclid apply needs 1 <= n <= 3");
    const auto f = euclid::make_test_function(a.fn, a.n);
    std::vector<euclid::Point> xs;
    for (const auto& p : pts) {
      euclid::Point q{0.0, 0.0, 0.0};
      for (std::size_t d = 0; d < dim; ++d) q[d] = p[d];
      xs.push_back(q);
    }
    if (a.route == "multiplier") {
      const double L = a.L.value_or(a.fn == "gaussian" ? 24.0 : 12.0);
      const int N = a.N.value_or(a.n == 1 ? 1024 : (a.n == 2 ? 256 : 64));
      vals = a.op == "log" ? euclid::log_multiplier_rn(f, xs, L, N) : euclid::frac_multiplier_rn(f, xs, *a.s, L, N);
      meta["L"] = L;
      meta["N"] = N;
    } else {
      const bool pw = a.route == "pointwise";
      auto ev = [&](std::size_t i) {
        if (a.op == "log") return pw ? euclid::log_pointwise(f, xs[i], a.cfg) : euclid::log_bochner_point(f, xs[i], a.cfg);
        return pw ? euclid::frac_pointwise(f, xs[i], *a.s, a.cfg) : euclid::frac_bochner_point(f, xs[i], *a.s, a.cfg);
      };
      vals = workers <= 1 ? parallel::map_serial(pts.size(), ev) : parallel::map(pts.size(), ev, workers);
      meta["tolerances"] = tolerances(a.cfg);
    }
  }

  std::ostringstream csv;
  if (hyper) {
    csv << "x_dist,value\n";
  } else {
    for (std::size_t d = 0; d < dim; ++d) csv << 'x' << d << ',';
    csv << "value\n";
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (double c : pts[i]) csv << io::format_double(c) << ',';
    csv << io::format_double(vals[i]) << '\n';
  }
  meta["points"] = pts.size();
  emit(a.out, csv.str(), meta);
  return 0;
}

// ---- verify ----

int cmd_verify(const std::string& suite, const std::optional<std::string>& json_out) {
  const auto rep = verify::run_suite(suite, parallel::default_workers());
  for (const auto& c : rep.criteria) {
    std::printf("%s %2d %-42s", c.pass() ? "PASS" : "FAIL", c.number, c.title.c_str());
    std::printf(" worst measured/bound %.3g\n", c.worst_margin());
    for (const auto& k : c.checks)
      if (!k.pass) std::printf("     FAIL %s: %.6g > %.6g (%s)\n", k.id.c_str(), k.measured, k.bound, k.description.c_str());
  }
  std::printf("suite %s: %s\n", suite.c_str(), rep.pass() ? "pass" : "FAIL");
  if (json_out) write_file(*json_out, rep.json());
  return rep.pass() ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logarithmic and fractional Laplacians: kernels, operators, verification"};
  app.require_subcommand(1);

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Tabulate a radial kernel");
  kernel->add_option("--space", ka.space)->check(CLI::IsMember({"euclid", "hyperbolic"}));
  kernel->add_option("--kind", ka.kind)->check(CLI::IsMember({"frac", "log1", "log2", "heat"}));
  kernel->add_option("--n", ka.n);
  kernel->add_option("--s", ka.s);
  kernel->add_option("--t", ka.t);
  kernel->add_option("--r-min", ka.r_min);
  kernel->add_option("--r-max", ka.r_max);
  kernel->add_option("--points", ka.points);
  kernel->add_option("--spacing", ka.spacing)->check(CLI::IsMember({"linear", "log"}));
  kernel->add_option("--route", ka.route)
      ->check(CLI::IsMember({"time_quadrature", "bessel_closed_form", "term_algebra", "closed_form"}));
  kernel->add_option("--out", ka.out, "CSV path; metadata goes to <out>.json");

  ApplyArgs aa;
  auto* apply = app.add_subcommand("apply", "Apply log(-Delta) or (-Delta)^s to a registry function");
  apply->add_option("--space", aa.space)->check(CLI::IsMember({"euclid", "hyperbolic"}));
  apply->add_option("--op", aa.op)->check(CLI::IsMember({"log", "frac"}));
  apply->add_option("--route", aa.route)->check(CLI::IsMember({"multiplier", "pointwise", "bochner"}));
  apply->add_option("--fn", aa.fn);
  apply->add_option("--n", aa.n);
  apply->add_option("--s", aa.s);
  apply->add_option("--x", aa.x, "Point coordinates (euclid) or distance to the center (hyperbolic)");
  apply->add_option("--points", aa.points_file, "File with one comma-separated point per line");
  apply->add_option("--L", aa.L, "Torus side for the multiplier route");
  apply->add_option("--N", aa.N, "Grid points per axis for the multiplier route");
  apply->add_option("--rel-tol", aa.cfg.rel_tol, "Quadrature relative tolerance");
  apply->add_option("--abs-tol", aa.cfg.abs_tol, "Quadrature absolute tolerance");
  apply->add_option("--max-subdivisions", aa.cfg.max_subdivisions, "Quadrature subdivision budget");
  apply->add_option("--out", aa.out, "CSV path; metadata goes to <out>.json");

  std::string suite = "all";
  std::optional<std::string> json_out;
  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("--suite", suite)->check(CLI::IsMember(verify::suite_names()));
  ver->add_option("--json-out", json_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*kernel) return cmd_kernel(ka);
    if (*apply) return cmd_apply(aa);
    return cmd_verify(suite, json_out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "error: %s (best estimate %.6g, error %.3g)\n", e.what(), e.best_estimate(), e.error_estimate());
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    // DomainError, SmoothnessTooLow, RouteMismatch
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailed;
  }
}
