#include "loglap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "loglap/errors.hpp"
#include "loglap/euclid.hpp"
#include "loglap/hyperbolic.hpp"
#include "loglap/quad.hpp"
#include "loglap/spectral.hpp"
#include "loglap/specfun.hpp"

namespace loglap::verify {

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* pattern, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::vector<double> linspace(double a, double b, int k) {
  std::vector<double> v;
  for (int i = 0; i < k; ++i) v.push_back(a + (b - a) * i / (k - 1));
  return v;
}

std::vector<double> logspace(double a, double b, int k) {
  std::vector<double> v;
  for (int i = 0; i < k; ++i) v.push_back(a * std::pow(b / a, double(i) / (k - 1)));
  return v;
}

using Checks = std::vector<Check>;

Checks specfun_spot() {
  Checks out;
  // erf by its Maclaurin series
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < 40; ++k) {
    sum += term / (2 * k + 1);
    term *= -1.0 / (k + 1);
  }
  const double erf1 = 2.0 / std::sqrt(kPi) * sum;
  out.push_back(make_check("specfun.erf1", "erf(1) against its Maclaurin series", std::abs(specfun::erf(1.0) - erf1),
                           1e-13, "error function"));
  out.push_back(make_check("specfun.erf_odd", "erf(-1.3) = -erf(1.3)",
                           std::abs(specfun::erf(-1.3) + specfun::erf(1.3)), 1e-15, "error function"));
  out.push_back(make_check("specfun.k_half", "K_1/2(1) against sqrt(pi/2) e^-1",
                           rel(specfun::bessel_k(0.5, 1.0), std::sqrt(kPi / 2.0) * std::exp(-1.0)), 1e-10,
                           "half-integer Bessel closed form"));
  out.push_back(make_check("specfun.k_recurrence", "K_2(2) = K_0(2) + K_1(2)",
                           rel(specfun::bessel_k(2.0, 2.0), specfun::bessel_k(0.0, 2.0) + specfun::bessel_k(1.0, 2.0)),
                           1e-10, "Bessel three-term recurrence"));
  quad::QuadratureConfig c;
  c.abs_tol = 1e-16;
  c.rel_tol = 1e-13;
  const double e1 = quad::integrate_semiinfinite([](double u) { return std::exp(-u) / u; }, 1.0, c).value;
  out.push_back(make_check("specfun.e1", "E1(1) against its defining integral", rel(specfun::exp_integral_e1(1.0), e1),
                           1e-12, "exponential integral"));
  // Euler constant from an Euler-Maclaurin corrected harmonic sum.
  const int N = 100000;
  double h = 0.0, comp = 0.0;
  for (int k = N; k >= 1; --k) {
    const double y = 1.0 / k - comp;
    const double t = h + y;
    comp = (t - h) - y;
    h = t;
  }
  const double n = N;
  const double gamma = h - std::log(n) - 1.0 / (2 * n) + 1.0 / (12 * n * n) - 1.0 / (120 * n * n * n * n);
  out.push_back(make_check("specfun.euler_gamma", "Euler constant against the corrected harmonic sum",
                           std::abs(gamma - specfun::kEulerGamma), 1e-13, "Euler-Mascheroni constant"));
  double worst = 0.0;
  for (double a : {0.1, 0.7, 3.3, 12.5, 49.0}) worst = std::max(worst, std::abs(specfun::digamma(a + 1) - specfun::digamma(a) - 1 / a));
  out.push_back(make_check("specfun.digamma", "psi(a+1) - psi(a) = 1/a", worst, 1e-11, "digamma recurrence"));
  worst = 0.0;
  for (auto [a, x] : std::vector<std::pair<double, double>>{{0.5, 0.3}, {1.5, 2.0}, {3.2, 7.5}}) {
    const double lhs = specfun::upper_gamma(a + 1, x);
    worst = std::max(worst, rel(lhs, a * specfun::upper_gamma(a, x) + std::pow(x, a) * std::exp(-x)));
  }
  out.push_back(make_check("specfun.upper_gamma", "Gamma(a+1,x) = a Gamma(a,x) + x^a e^-x", worst, 1e-10,
                           "incomplete gamma recurrence"));
  return out;
}

const quad::ScalarIdentityReport& scalar_identities() {
  static const quad::ScalarIdentityReport rep = quad::verify_scalar_identities({1, 2, 3, 4, 5, 6});
  return rep;
}

Checks c01_frullani() {
  double worst = 0.0;
  for (int i = 0; i < 13; ++i) {
    const double l = std::pow(10.0, -3.0 + 0.5 * i);
    worst = std::max(worst, std::abs(quad::frullani_log(l) - std::log(l)));
  }
  return {make_check("c01.frullani", "max |frullani_log - log| over 13 lambda in [1e-3, 1e3]", worst, 1e-9,
                     "scalar Frullani representation of log")};
}

Checks c02_euler() {
  return {make_check("c02.euler", "|I1 + I2 + gamma|", scalar_identities().euler_residual, 1e-10,
                     "Euler constant as a split time integral")};
}

Checks c03_fhzdk() {
  Checks out;
  for (const auto& f : scalar_identities().fhzdk) {
    out.push_back(make_check("c03.n" + std::to_string(f.n), "iterated integral vs Gamma'(n/2)/2 + Gamma(n/2) log 2",
                             f.residual, 1e-8, "log-moment double integral identity"));
  }
  return out;
}

Checks c04_gamma_tail() {
  int pts = 0, bad = 0;
  for (const auto& p : scalar_identities().gamma_tail) {
    if (p.n > 5) continue;
    ++pts;
    if (!p.holds) ++bad;
  }
  return {make_check("c04.points", "scan points with the two-sided bound violated (of " + std::to_string(pts) + ")", bad,
                     0.0, "incomplete gamma tail bounds"),
          make_check("c04.coverage", "missing scan points (expected 160)", std::abs(160.0 - pts), 0.0,
                     "incomplete gamma tail bounds")};
}

std::vector<euclid::Point> bump_points(int n) {
  if (n == 1) return {{0.0, 0, 0}, {0.3, 0, 0}, {-0.5, 0, 0}, {0.7, 0, 0}, {0.9, 0, 0}};
  return {{0.0, 0.0, 0}, {0.2, 0.1, 0}, {-0.5, 0.3, 0}, {0.7, 0.0, 0}, {0.1, -0.85, 0}};
}

Checks c05_euclid_routes() {
  using namespace euclid;
  Checks out;
  for (int n : {1, 2}) {
    const auto b = make_test_function("bump", n);
    const auto pts = bump_points(n);
    const auto mult = log_multiplier_rn(b, pts, 12.0, n == 1 ? 1024 : 512);
    double wp = 0.0, wb = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      wp = std::max(wp, rel(log_pointwise(b, pts[i]), mult[i]));
      wb = std::max(wb, rel(log_bochner_point(b, pts[i]), mult[i]));
    }
    const std::string tag = "c05.bump.n" + std::to_string(n);
    out.push_back(make_check(tag + ".pointwise", "max rel |pointwise - multiplier| at 5 interior points", wp, 2e-3,
                             "pointwise singular-integral formula on R^n"));
    out.push_back(make_check(tag + ".bochner", "max rel |bochner - multiplier| at 5 interior points", wb, 2e-3,
                             "Bochner heat-semigroup formula"));

    const auto g = make_test_function("gaussian", n);
    const double exact = specfun::digamma(0.5 * n) + std::log(2.0);
    const euclid::Point o{0, 0, 0};
    const std::string gt = "c05.gaussian.n" + std::to_string(n);
    out.push_back(make_check(gt + ".pointwise", "|pointwise - (psi(n/2) + log 2)| at 0", std::abs(log_pointwise(g, o) - exact),
                             1e-3, "Gaussian log-moment"));
    out.push_back(make_check(gt + ".bochner", "|bochner - (psi(n/2) + log 2)| at 0",
                             std::abs(log_bochner_point(g, o) - exact), 1e-3, "Gaussian log-moment"));
    out.push_back(make_check(gt + ".multiplier", "|multiplier on L=24 torus - (psi(n/2) + log 2)| at 0",
                             std::abs(log_multiplier_rn(g, {o}, 24.0, n == 1 ? 512 : 128)[0] - exact), 1e-4,
                             "Gaussian log-moment"));
  }
  return out;
}

Checks c06_frac_constant() {
  using namespace euclid;
  Checks out;
  double worst = 0.0;
  for (int n : {1, 2, 3})
    for (double s : {0.25, 0.5, 0.75}) worst = std::max(worst, rel(frac_constant_bochner(n, s), frac_constant(n, s).c_ns));
  out.push_back(make_check("c06.constant", "max rel |closed-form c_ns - Bochner prefactor| over 9 (n,s)", worst, 1e-8,
                           "fractional Laplacian normalizing constant"));
  const euclid::Point o{0, 0, 0};
  for (int n : {1, 2}) {
    const auto g = make_test_function("gaussian", n);
    double wm = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
      const double exact = std::pow(2.0, s) * specfun::gamma(0.5 * n + s) / specfun::gamma(0.5 * n);
      wm = std::max(wm, std::abs(frac_multiplier_rn(g, {o}, s, 24.0, n == 1 ? 512 : 128)[0] - exact));
    }
    out.push_back(make_check("c06.moment.n" + std::to_string(n) + ".multiplier",
                             "max |multiplier - 2^s Gamma(n/2+s)/Gamma(n/2)| at 0, s in {.25,.5,.75}", wm, 1e-3,
                             "Gaussian fractional moment"));
    const double exact = std::sqrt(2.0) * specfun::gamma(0.5 * n + 0.5) / specfun::gamma(0.5 * n);
    out.push_back(make_check("c06.moment.n" + std::to_string(n) + ".pointwise",
                             "|pointwise - 2^s Gamma(n/2+s)/Gamma(n/2)| at 0, s = 0.5",
                             std::abs(frac_pointwise(g, o, 0.5) - exact), 1e-3, "Gaussian fractional moment"));
    out.push_back(make_check("c06.moment.n" + std::to_string(n) + ".bochner",
                             "|bochner - 2^s Gamma(n/2+s)/Gamma(n/2)| at 0, s = 0.5",
                             std::abs(frac_bochner_point(g, o, 0.5) - exact), 1e-3, "Gaussian fractional moment"));
  }
  return out;
}

Checks c07_limits() {
  using namespace euclid;
  Checks out;
  const auto b = make_test_function("bump", 1);
  const auto e0 = limits_report(b, {0.2, 0.1, 0.05, 0.02}, 8.0, 256);
  int bad = 0;
  for (std::size_t i = 1; i < e0.rows.size(); ++i)
    if (!(e0.rows[i].e0 < e0.rows[i - 1].e0)) ++bad;
  out.push_back(make_check("c07.e0", "steps where e0(s) fails to decrease along s = .2,.1,.05,.02", bad, 0.0,
                           "(-Delta)^s f -> f as s -> 0"));
  const auto e1 = limits_report(b, {1e-4}, 8.0, 256);
  out.push_back(make_check("c07.e1", "e1(1-s)/||Delta f|| at s = 1e-4", e1.rows[0].e1 / e1.laplacian_norm, 1e-3,
                           "(-Delta)^s f -> -Delta f as s -> 1"));
  const auto q = limits_report(b, {0.1, 0.05, 0.01}, 8.0, 256);
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : q.rows) {
    lo = std::min(lo, r.q / r.s);
    hi = std::max(hi, r.q / r.s);
  }
  out.push_back(make_check("c07.q", "max/min of q(s)/s over s = .1,.05,.01", hi / lo, 3.0,
                           "((-Delta)^s f - f)/s -> log(-Delta) f at rate O(s)"));
  return out;
}

double p3_closed(double r, double t) {
  const double ratio = r == 0.0 ? 1.0 : r / std::sinh(r);
  return std::pow(4.0 * kPi * t, -1.5) * ratio * std::exp(-t - r * r / (4.0 * t));
}

Checks c08_heat() {
  using namespace hyperbolic;
  Checks out;
  double worst = 0.0;
  for (double r : {0.1, 0.5, 1.0, 2.0, 5.0})
    for (double t : {0.1, 1.0}) worst = std::max(worst, rel(heat_kernel(3, r, t), p3_closed(r, t)));
  out.push_back(make_check("c08.closed_form", "max rel |term algebra - closed form| at 10 (r,t)", worst, 1e-12,
                           "H^3 heat kernel"));
  for (double t : {0.1, 1.0, 10.0})
    out.push_back(make_check("c08.mass.t" + fmt("%g", t), "|mass - 1|", std::abs(heat_mass(3, t) - 1.0), 1e-8,
                             "stochastic completeness of H^3"));
  for (double d : {0.0, 1.0, 2.0}) {
    const auto ck = chapman_kolmogorov(3, 0.5, 0.5, d);
    out.push_back(make_check("c08.ck.d" + fmt("%g", d), "|int p_t p_s - p_{t+s}| at t = s = 0.5",
                             std::abs(ck.lhs - ck.rhs), 1e-6, "semigroup property"));
  }
  return out;
}

Checks c09_dm() {
  Checks out;
  const auto rg = linspace(0.0, 10.0, 30);
  const auto tg = logspace(0.01, 10.0, 30);
  for (int n : {2, 3}) {
    const auto scan = hyperbolic::dm_ratio_scan(n, rg, tg);
    out.push_back(make_check("c09.n" + std::to_string(n), "C = ratio_max/ratio_min on 30x30 grid", scan.constant(), 10.0,
                             "Davies-Mandouvalos two-sided bound"));
  }
  return out;
}

struct TableCache {
  int workers;
  hyperbolic::KernelTable build(hyperbolic::KernelKind kind, int n, std::optional<double> s, const std::vector<double>& grid) {
    return hyperbolic::build_kernel_table(kind, n, s, {}, grid, hyperbolic::KernelRoute::time_quadrature, {}, workers);
  }
};

Checks c10_frac_asymptotics(int workers) {
  using namespace hyperbolic;
  Checks out;
  TableCache tc{workers};
  const auto small = logspace(1e-3, 0.05, 10);
  const auto large = linspace(40.0, 160.0, 12);
  for (int n : {2, 3}) {
    for (double s : {0.25, 0.5, 0.75}) {
      const std::string tag = "c10.n" + std::to_string(n) + ".s" + fmt("%g", s);
      const auto fs = asympt_fit(tc.build(KernelKind::frac, n, s, small), FitRegime::small_r, FitModel::power);
      out.push_back(make_check(tag + ".small_slope", "rel error of fitted slope vs -(n+2s)",
                               rel(fs.log_coefficient(), -(n + 2 * s)), 0.02, "small-r kernel singularity"));
      const auto fl = asympt_fit(tc.build(KernelKind::frac, n, s, large), FitRegime::large_r, FitModel::power_exp);
      out.push_back(make_check(tag + ".large_rate", "rel error of fitted rate vs -(n-1)",
                               rel(fl.linear_coefficient(), -(n - 1.0)), 0.02, "large-r exponential decay"));
      out.push_back(make_check(tag + ".large_power", "rel error of fitted power vs -(1+s)",
                               rel(fl.log_coefficient(), -(1.0 + s)), 0.10, "large-r power correction"));
    }
  }
  return out;
}

Checks c11_log_asymptotics(int workers) {
  using namespace hyperbolic;
  Checks out;
  TableCache tc{workers};
  for (int n : {2, 3}) {
    const std::string tag = "c11.n" + std::to_string(n);
    const auto k1s = asympt_fit(tc.build(KernelKind::log1, n, {}, logspace(1e-3, 0.05, 10)), FitRegime::small_r,
                                FitModel::power);
    out.push_back(make_check(tag + ".k1_small_slope", "rel error of K1 slope vs -n", rel(k1s.log_coefficient(), -n), 0.02,
                             "K1 near-diagonal singularity"));
    const auto k1l = asympt_fit(tc.build(KernelKind::log1, n, {}, linspace(6.0, 20.0, 12)), FitRegime::large_r,
                                FitModel::gaussian_tail);
    out.push_back(make_check(tag + ".k1_gauss", "rel error of K1 r^2 coefficient vs -1/4",
                             rel(k1l.quadratic_coefficient(), -0.25), 0.02, "K1 Gaussian tail"));
    const auto k2l = asympt_fit(tc.build(KernelKind::log2, n, {}, linspace(40.0, 160.0, 12)), FitRegime::large_r,
                                FitModel::power_exp);
    out.push_back(make_check(tag + ".k2_rate", "rel error of K2 rate vs -(n-1)", rel(k2l.linear_coefficient(), -(n - 1.0)),
                             0.02, "K2 exponential decay"));
    out.push_back(make_check(tag + ".k2_power", "rel error of K2 power vs -1", rel(k2l.log_coefficient(), -1.0), 0.15,
                             "K2 power correction"));
    const auto k2s = tc.build(KernelKind::log2, n, {}, linspace(0.01, 0.1, 10));
    const auto [mn, mx] = std::minmax_element(k2s.values.begin(), k2s.values.end());
    out.push_back(make_check(tag + ".k2_flat", "(max - min)/max of K2 on [0.01, 0.1]", (*mx - *mn) / *mx, 0.10,
                             "K2 bounded at the diagonal"));
  }
  return out;
}

Checks c12_norms() {
  Checks out;
  for (double p : {1.5, 2.0}) {
    const auto rep = hyperbolic::kernel_norms(3, p, {20.0, 30.0});
    out.push_back(make_check("c12.p" + fmt("%g", p), "rel change of ||K2||_{L^p(B_R)} from R = 20 to 30",
                             rep.last_relative_change, 1e-6, "K2 in L^p for p > 1"));
  }
  const auto one = hyperbolic::kernel_norms(3, 1.0, {40.0 / 3.0, 20.0, 30.0});
  const double g0 = one.log_growth.at(0), g1 = one.log_growth.at(1);
  out.push_back(make_check("c12.p1", "|c_2/c_1 - 1| for increments c_i = dnorm/dlog R", std::abs(g1 / g0 - 1.0), 0.2,
                           "||K2||_L1(B_R) ~ c log R"));
  return out;
}

Checks c13_split() {
  Checks out;
  const auto f = hyperbolic::hyper_bump();
  for (double a : {0.0, 1.0}) {
    const auto rep = hyperbolic::split_check(3, f, a);
    out.push_back(make_check("c13.split.x" + fmt("%g", a), "|near + far + R - full| / (1 + |full|)",
                             rep.residual / (1.0 + std::abs(rep.full)), 1e-8, "near/far split with remainder"));
  }
  const auto e = hyperbolic::energy_inequality(3, f, 2.0);
  out.push_back(make_check("c13.energy", "lhs/rhs of the remainder energy inequality (p = 2)", e.lhs / e.rhs_signed, 1.0,
                           "remainder energy bound"));
  return out;
}

Checks c14_massloss() {
  Checks out;
  const auto sw = spectral::massloss_sweep(1.0, {0.2, 0.1, 0.05, 0.02});
  int bad = 0;
  for (std::size_t i = 1; i < sw.values.size(); ++i)
    if (!(sw.values[i] > sw.values[i - 1])) ++bad;
  out.push_back(make_check("c14.monotone", "steps where V_s(1) fails to increase along s = .2,.1,.05,.02", bad, 0.0,
                           "V_s -> 1 - H as s -> 0"));
  out.push_back(make_check("c14.limit", "|extrapolated V_0(1) - 1|", std::abs(sw.extrapolated - 1.0), 1e-2,
                           "V_s -> 1 - H as s -> 0, H = 0 on the killed half-line"));
  const auto d = spectral::frac_discrepancy_halfline(spectral::halfline_bump(1.0, 2.0), 0.5, 1.5);
  out.push_back(make_check("c14.discrepancy", "|A - B - V_s f(x)| / (1 + |A|), bump on [1,2], x = 1.5, s = 0.5",
                           d.residual / (1.0 + std::abs(d.A)), 1e-6, "spectral minus heat-kernel fractional Laplacian"));
  return out;
}

Checks c15_embedding() {
  const auto rows = spectral::embedding_counterexample(0.25, {1000, 1000000});
  const double dG = rows[1].G - rows[0].G, dF = rows[1].F - rows[0].F;
  return {make_check("c15.G", "6.0 - (G(1e6) - G(1e3))", 6.0 - dG, 0.0, "H^log not contained in H^{2 eps}"),
          make_check("c15.F", "F(1e6) - F(1e3) at eps = 0.25", dF, 1e-3, "H^log not contained in H^{2 eps}")};
}

Checks c16_bessel() {
  using namespace hyperbolic;
  double worst = 0.0;
  for (int n : {3, 5})
    for (double s : {0.25, 0.5, 0.75})
      for (double r : {0.5, 1.0, 2.0, 4.0})
        worst = std::max(worst, rel(frac_kernel(n, s, r, KernelRoute::time_quadrature),
                                    frac_kernel(n, s, r, KernelRoute::bessel_closed_form)));
  return {make_check("c16.routes", "max rel |time quadrature - Bessel closed form| over 24 (n,s,r)", worst, 1e-7,
                     "Bessel form of the fractional kernel in odd dimension")};
}

const std::map<int, std::string>& titles() {
  static const std::map<int, std::string> t = {
      {0, "special functions"},
      {1, "Frullani integral"},
      {2, "Euler constant split"},
      {3, "log-moment double integral"},
      {4, "incomplete gamma tail bounds"},
      {5, "Euclidean route equivalence"},
      {6, "fractional constant and Gaussian moments"},
      {7, "s-limits on the torus"},
      {8, "H^3 heat kernel"},
      {9, "Davies-Mandouvalos ratio"},
      {10, "fractional kernel asymptotics"},
      {11, "K1/K2 asymptotics"},
      {12, "K2 integrability"},
      {13, "split identity and energy inequality"},
      {14, "mass loss on the killed half-line"},
      {15, "embedding dichotomy"},
      {16, "Bessel route equivalence"},
  };
  return t;
}

long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Check make_check(std::string id, std::string description, double measured, double bound, std::string source) {
  return {std::move(id), std::move(description), measured, bound, measured <= bound, std::move(source)};
}

bool Criterion::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double Criterion::worst_margin() const {
  double w = 0.0;
  for (const auto& c : checks) {
    if (!c.pass) return std::isnan(c.measured) ? NAN : std::max(w, c.bound == 0.0 ? INFINITY : c.measured / c.bound);
    if (c.bound > 0.0) w = std::max(w, c.measured / c.bound);
  }
  return w;
}

Criterion run_criterion(int number, int workers) {
  const auto it = titles().find(number);
  if (it == titles().end()) throw DomainError("run_criterion: no criterion " + std::to_string(number));
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c{number, it->second, {}, 0};
  try {
    switch (number) {
      case 0: c.checks = specfun_spot(); break;
      case 1: c.checks = c01_frullani(); break;
      case 2: c.checks = c02_euler(); break;
      case 3: c.checks = c03_fhzdk(); break;
      case 4: c.checks = c04_gamma_tail(); break;
      case 5: c.checks = c05_euclid_routes(); break;
      case 6: c.checks = c06_frac_constant(); break;
      case 7: c.checks = c07_limits(); break;
      case 8: c.checks = c08_heat(); break;
      case 9: c.checks = c09_dm(); break;
      case 10: c.checks = c10_frac_asymptotics(workers); break;
      case 11: c.checks = c11_log_asymptotics(workers); break;
      case 12: c.checks = c12_norms(); break;
      case 13: c.checks = c13_split(); break;
      case 14: c.checks = c14_massloss(); break;
      case 15: c.checks = c15_embedding(); break;
      case 16: c.checks = c16_bessel(); break;
    }
  } catch (const NonConvergence&) {
    throw;
  } catch (const std::exception& e) {
    // A thrown check is a failed check, reported with the reason.
    c.checks.push_back(make_check("c" + std::to_string(number) + ".exception", e.what(), NAN, 0.0, it->second));
  }
  c.wall_time_ms = elapsed_ms(t0);
  return c;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"all", "specfun", "identities", "euclid", "hyperbolic", "spectral"};
  return names;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "specfun") return {0};
  if (suite == "identities") return {1, 2, 3, 4};
  if (suite == "euclid") return {5, 6, 7};
  if (suite == "hyperbolic") return {8, 9, 10, 11, 12, 13, 16};
  if (suite == "spectral") return {14, 15};
  if (suite == "all") {
    std::vector<int> v;
    for (int k = 0; k <= 16; ++k) v.push_back(k);
    return v;
  }
  throw DomainError("unknown suite '" + suite + "'");
}

bool Report::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass(); });
}

std::string Report::json() const {
  using nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json j;
  j["suite"] = suite;
  j["pass"] = pass();
  ordered_json checks = ordered_json::array();
  ordered_json crit = ordered_json::array();
  for (const auto& c : criteria) {
    crit.push_back({{"number", c.number}, {"title", c.title}, {"pass", c.pass()}, {"wall_time_ms", c.wall_time_ms}});
    for (const auto& k : c.checks) {
      checks.push_back({{"id", k.id},
                        {"description", k.description},
                        {"measured", num(k.measured)},
                        {"bound", num(k.bound)},
                        {"pass", k.pass},
                        {"source", k.source}});
    }
  }
  j["criteria"] = crit;
  j["checks"] = checks;
  j["wall_time_ms"] = wall_time_ms;
  return j.dump(2) + "\n";
}

Report run_suite(const std::string& suite, int workers) {
  const auto ids = suite_criteria(suite);
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  r.suite = suite;
  for (int k : ids) r.criteria.push_back(run_criterion(k, workers));
  r.wall_time_ms = elapsed_ms(t0);
  return r;
}

}  // namespace loglap::verify
