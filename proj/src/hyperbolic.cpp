#include "loglap/hyperbolic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include "json.hpp"

#include "loglap/errors.hpp"
#include "loglap/io.hpp"
#include "loglap/parallel.hpp"
#include "loglap/specfun.hpp"

namespace loglap::hyperbolic {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dimension(int n, const char* what) {
  if (n < 2 || n > 5) throw DomainError(std::string(what) + ": n must be in {2,3,4,5}");
}

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

// cosh r - 1 without cancellation.
double cosh_m1(double r) {
  const double h = std::sinh(0.5 * r);
  return 2.0 * h * h;
}

// Inverse of cosh_m1.
double acosh_1p(double w) { return 2.0 * std::asinh(std::sqrt(0.5 * w)); }

double sinh_pow(double r, int k) { return k == 0 ? 1.0 : std::pow(std::sinh(r), k); }

// v sinh^(n-1) r, with an underflowed kernel value winning over an overflowed volume factor.
double with_volume(double v, int n, double r) { return v == 0.0 ? 0.0 : v * sinh_pow(r, n - 1); }

// Relative-only tolerances for kernel integrals, whose values span hundreds of decades.
quad::QuadratureConfig kernel_cfg(const quad::QuadratureConfig& cfg) {
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 0.0;
  c.rel_tol = std::min(cfg.rel_tol, 1e-11);
  c.max_subdivisions = std::max(cfg.max_subdivisions, 4000);
  return c;
}

// --- power series in w = cosh r - 1 ------------------------------------------
//
// Near r = 0 the term algebra cancels catastrophically. Functions of cosh r are
// analytic in w, and D = d/dw, so D^m reduces to differentiating a series.

constexpr int kSeriesTerms = 60;
using Series = std::array<double, kSeriesTerms>;

// r^2 = sum_k phi_k w^k.
const Series& r2_series() {
  static const Series s = [] {
    Series c{};
    double binom = 1.0;  // C(2k, k)
    for (int k = 1; k < kSeriesTerms; ++k) {
      binom *= (2.0 * k) * (2.0 * k - 1.0) / (double(k) * k);
      c[k] = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::pow(2.0, k) / (double(k) * k * binom);
    }
    return c;
  }();
  return s;
}

// r / sinh r = sum_k q_k w^k.
const Series& r_csch_series() {
  static const Series s = [] {
    Series c{};
    double binom = 1.0;
    c[0] = 1.0;
    for (int k = 1; k < kSeriesTerms; ++k) {
      binom *= (2.0 * k) * (2.0 * k - 1.0) / (double(k) * k);
      c[k] = std::pow(-2.0, k) / ((2.0 * k + 1.0) * binom);
    }
    return c;
  }();
  return s;
}

// (d/dw)^m of e^(-r^2/4t) [times r/sinh r] at w0, using v = w/sigma to keep coefficients bounded.
double series_derivative(int m, double w0, double t, bool with_r_csch) {
  const double sigma = std::min(t, 1.0);
  const Series& phi = r2_series();
  Series S{}, E{};
  double sp = 1.0;
  for (int k = 1; k < kSeriesTerms; ++k) {
    sp *= sigma;
    S[k] = -phi[k] * sp / (4.0 * t);
  }
  E[0] = 1.0;
  for (int k = 1; k < kSeriesTerms; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * S[j] * E[k - j];
    E[k] = acc / k;
  }
  if (with_r_csch) {
    const Series& q = r_csch_series();
    Series P{};
    std::array<double, kSeriesTerms> qs{};
    double s2 = 1.0;
    for (int k = 0; k < kSeriesTerms; ++k) {
      qs[k] = q[k] * s2;
      s2 *= sigma;
    }
    for (int k = 0; k < kSeriesTerms; ++k) {
      double acc = 0.0;
      for (int j = 0; j <= k; ++j) acc += qs[j] * E[k - j];
      P[k] = acc;
    }
    E = P;
  }
  const double v0 = w0 / sigma;
  double acc = 0.0, vp = 1.0;
  for (int k = m; k < kSeriesTerms; ++k) {
    double falling = 1.0;
    for (int j = 0; j < m; ++j) falling *= (k - j);
    acc += E[k] * falling * vp;
    vp *= v0;
  }
  return acc * std::pow(sigma, -m);
}

bool use_series(double w, double t) { return w <= std::min(0.02, t); }

// --- cached term sums ----------------------------------------------------------

const TermSum& odd_heat_sum(int m) {
  static const std::array<TermSum, 3> sums = [] {
    std::array<TermSum, 3> out;
    for (int k = 0; k < 3; ++k) {
      TermSum s = heat_seed(k);
      for (int j = 0; j < k; ++j) s = s.derivative();
      out[k] = s;
    }
    return out;
  }();
  return sums.at(m);
}

// D^m of x csch x e^(-x^2/4t), the even-dimension integrand.
const TermSum& even_heat_sum(int m) {
  static const std::array<TermSum, 2> sums = [] {
    std::array<TermSum, 2> out;
    RadialTerm h;
    h.r_pow = 1;
    h.csch_pow = 1;
    h.gauss = true;
    TermSum s;
    s.terms = {h};
    out[0] = s;
    out[1] = s.derivative();
    return out;
  }();
  return sums.at(m);
}

// Scaled heat kernel for odd n = 2m+1.
double odd_heat_scaled(int n, double r, double t) {
  const int m = (n - 1) / 2;
  const double C = ((m % 2) ? -1.0 : 1.0) / (std::pow(2.0 * kPi, m) * std::sqrt(4.0 * kPi * t));
  const double w = cosh_m1(r);
  if (use_series(w, t)) {
    return C * std::exp(-double(m) * m * t) * series_derivative(m, w, t, false) * std::exp(r * r / (4.0 * t));
  }
  return C * odd_heat_sum(m).eval_without_gauss(r, t);
}

// Scaled heat kernel for even n = 2m+2 via cosh x = cosh r + u^2.
double even_heat_scaled(int n, double r, double t, const quad::QuadratureConfig& cfg) {
  const int m = (n - 2) / 2;
  const double C = ((m % 2) ? -1.0 : 1.0) / (std::pow(2.0, m + 2.5) * std::pow(kPi, m + 1.5));
  const double wr = cosh_m1(r);
  const double b = std::sqrt(0.5 * wr);
  const TermSum& sum = even_heat_sum(m);
  auto g = [&](double u) {
    if (u > 1e100) return 0.0;  // x ~ 2 log u: the Gaussian factor is long gone
    const double wx = wr + u * u;
    if (use_series(wx, t)) {
      return 2.0 * series_derivative(m, wx, t, true) * std::exp(r * r / (4.0 * t));
    }
    const double x = acosh_1p(wx);
    const double a = std::sqrt(0.5 * wx);
    const double x_minus_r =
        2.0 * std::asinh(0.5 * u * u / (a * std::sqrt(1.0 + b * b) + b * std::sqrt(1.0 + a * a)));
    const double shift = x_minus_r * (x + r) / (4.0 * t);
    return 2.0 * sum.eval_without_gauss(x, t) * std::exp(-shift);
  };
  // Scale where the Gaussian factor has decayed by e^-1.
  const double x0 = std::sqrt(r * r + 4.0 * t);
  const double u0 = std::sqrt(std::max(cosh_m1(x0) - wr, 1e-300));
  std::vector<double> pts{0.0};
  if (u0 > 1.0) pts.push_back(1.0);
  pts.push_back(u0);
  pts.push_back(4.0 * u0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto kc = kernel_cfg(cfg);
  double I = quad::integrate_panels(g, pts, kc).checked("heat_kernel (even n)");
  I += quad::integrate_semiinfinite(g, pts.back(), kc).checked("heat_kernel (even n) tail");
  return C * std::pow(t, -1.5) * std::exp(-(2.0 * m + 1.0) * (2.0 * m + 1.0) * t / 4.0) * I;
}

// Saddle of e^(-r^2/4t - (n-1)^2 t/4) in t, used for long-time breakpoints.
std::vector<double> long_time_points(int n, double r, double T) {
  const double ts = r / (n - 1.0);
  std::vector<double> pts{T};
  for (double f : {0.25, 1.0, 4.0}) {
    if (f * ts > pts.back()) pts.push_back(f * ts);
  }
  return pts;
}

// int_T^inf p(r,t) w(t) dt with w a power of t.
double long_time_integral(int n, double r, double T, double power, const quad::QuadratureConfig& cfg) {
  if ((n - 1.0) * r > 1500.0) return 0.0;  // below e^-(n-1)r/2 everywhere
  auto g = [&](double t) { return heat_kernel(n, r, t, cfg) * std::pow(t, power); };
  const auto pts = long_time_points(n, r, T);
  const auto kc = kernel_cfg(cfg);
  double v = pts.size() > 1 ? quad::integrate_panels(g, pts, kc).checked("long-time kernel integral") : 0.0;
  v += quad::integrate_semiinfinite(g, pts.back(), kc).checked("long-time kernel integral tail");
  return v;
}

// int_0^T p_scaled(r,t) e^(-r^2/4t) t^(power) dt with u = r^2/4t.
double short_time_integral(const std::function<double(double)>& p_scaled, double r, double T, double power,
                           const quad::QuadratureConfig& cfg) {
  const double r2 = r * r;
  if (r2 / (4.0 * T) > 800.0) return 0.0;  // e^-u underflows on the whole range
  auto g = [&](double u) {
    const double t = r2 / (4.0 * u);
    // dt = -t du / u
    return p_scaled(t) * std::exp(-u) * std::pow(t, power + 1.0) / u;
  };
  return quad::integrate_semiinfinite(g, r2 / (4.0 * T), kernel_cfg(cfg)).checked("short-time kernel integral");
}

double bessel_frac_kernel(int n, double s, double r) {
  if (n != 3 && n != 5) throw RouteMismatch("frac_kernel: bessel_closed_form needs n in {3,5}");
  const int m = (n - 1) / 2;
  const double nu = s + 0.5;
  // int_0^inf t^(-nu-1) e^(-m^2 t - r^2/4t) dt = 2^(1+nu) m^nu r^-nu K_nu(m r)
  TermSum sum = bessel_seed(nu, m);
  for (int j = 0; j < m; ++j) sum = sum.derivative();
  const double C = ((m % 2) ? -1.0 : 1.0) / (std::pow(2.0 * kPi, m) * std::sqrt(4.0 * kPi)) *
                   std::pow(2.0, 1.0 + nu) * std::pow(double(m), nu);
  return C * sum.eval(r, 1.0);
}

double require_positive_r(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(std::string(what) + ": r must be > 0");
  return r;
}

// d(center, y) for y at distance r from x, angle theta, x at distance a from the center.
double law_of_cosines(double a, double r, double theta) {
  const double sh = std::sin(0.5 * theta);
  const double w = cosh_m1(a - r) + 2.0 * std::sinh(a) * std::sinh(r) * sh * sh;
  return acosh_1p(w);
}

// Angle at which d(center, y) = d.
double angle_for_distance(double a, double r, double d) {
  const double num = cosh_m1(d) - cosh_m1(a - r);
  const double den = 2.0 * std::sinh(a) * std::sinh(r);
  const double s2 = num / den;
  if (s2 <= 0.0) return 0.0;
  if (s2 >= 1.0) return kPi;
  return 2.0 * std::asin(std::sqrt(s2));
}

double sphere_mean_impl(int n, const std::function<double(double)>& profile, double support,
                        const std::vector<double>& breaks, double a, double r, const quad::QuadratureConfig& cfg) {
  if (r == 0.0) return profile(a);
  if (a == 0.0) return profile(r);
  if (std::abs(a - r) >= support) return 0.0;
  double hi = kPi;
  if (a + r > support) hi = angle_for_distance(a, r, support);
  std::vector<double> pts{0.0};
  for (double b : breaks) {
    const double th = angle_for_distance(a, r, b);
    if (th > 0.0 && th < hi) pts.push_back(th);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  auto g = [&](double th) { return profile(law_of_cosines(a, r, th)) * std::pow(std::sin(th), n - 2); };
  quad::QuadratureConfig c = cfg;
  c.abs_tol = std::min(cfg.abs_tol, 1e-14);
  c.rel_tol = std::min(cfg.rel_tol, 1e-12);
  const double v = quad::integrate_panels(g, pts, c).checked("sphere_mean");
  const double norm = std::sqrt(kPi) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
  return v / norm;
}

void require_dini(const HyperRadialFunction& f, const char* what) {
  f.validate();
  if (!f.smoothness.dini()) {
    throw SmoothnessTooLow(std::string(what) + ": function '" + f.id + "' is not Dini continuous");
  }
}

// Radial breakpoints of r -> A(r) for x at distance a.
std::vector<double> radial_points(const HyperRadialFunction& f, double a, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  std::vector<double> b = f.radial_breaks;
  b.push_back(f.support_radius);
  for (double x : b) {
    for (double c : {std::abs(a - x), a + x}) {
      if (c > lo && c < hi) pts.push_back(c);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

quad::QuadratureConfig outer_cfg(const quad::QuadratureConfig& cfg, double scale) {
  quad::QuadratureConfig c = cfg;
  c.abs_tol = std::max(1e-15, std::min(cfg.abs_tol, 1e-13) * scale);
  c.rel_tol = std::min(cfg.rel_tol, 1e-10);
  return c;
}

double sup_profile(const HyperRadialFunction& f) {
  double m = 0.0;
  for (int i = 0; i <= 64; ++i) m = std::max(m, std::abs(f.profile(f.support_radius * i / 64.0)));
  return std::max(m, 1e-300);
}

}  // namespace

// --- Rational / term algebra ---------------------------------------------------

Rational::Rational(long long p, long long q) : num(p), den(q) {
  if (q == 0) throw DomainError("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
Rational Rational::operator+(const Rational& o) const { return Rational(num * o.den + o.num * den, den * o.den); }

bool RadialTerm::same_shape(const RadialTerm& o) const {
  return t_pow2 == o.t_pow2 && m2_coeff == o.m2_coeff && r_pow == o.r_pow && coth_pow == o.coth_pow &&
         csch_pow == o.csch_pow && gauss == o.gauss && bessel_order_shift == o.bessel_order_shift &&
         scale_pow == o.scale_pow;
}

TermSum TermSum::derivative() const {
  TermSum out;
  out.bessel_base_order = bessel_base_order;
  out.bessel_scale = bessel_scale;
  auto add = [&](RadialTerm t) {
    t.csch_pow += 1;  // the 1/sinh r of D
    for (auto& e : out.terms) {
      if (e.same_shape(t)) {
        e.coeff = e.coeff + t.coeff;
        return;
      }
    }
    out.terms.push_back(t);
  };
  for (const auto& T : terms) {
    if (T.r_pow > 0) {
      RadialTerm d = T;
      d.coeff = T.coeff * Rational(T.r_pow);
      d.r_pow -= 1;
      add(d);
    }
    if (T.coth_pow > 0) {  // coth' = -csch^2
      RadialTerm d = T;
      d.coeff = T.coeff * Rational(-T.coth_pow);
      d.coth_pow -= 1;
      d.csch_pow += 2;
      add(d);
    }
    if (T.csch_pow > 0) {  // csch' = -coth csch
      RadialTerm d = T;
      d.coeff = T.coeff * Rational(-T.csch_pow);
      d.coth_pow += 1;
      add(d);
    }
    if (T.gauss) {
      RadialTerm d = T;
      d.coeff = T.coeff * Rational(-1, 2);
      d.r_pow += 1;
      d.t_pow2 -= 2;
      add(d);
    }
    if (T.bessel_order_shift) {  // (r^-mu K_mu(c r))' = -c r r^-(mu+1) K_(mu+1)(c r)
      RadialTerm d = T;
      d.coeff = T.coeff * Rational(-1);
      d.scale_pow += 1;
      d.r_pow += 1;
      d.bessel_order_shift = *T.bessel_order_shift + 1;
      add(d);
    }
  }
  std::erase_if(out.terms, [](const RadialTerm& t) { return t.coeff.num == 0; });
  return out;
}

namespace {

double eval_term(const RadialTerm& T, const TermSum& S, double r, double t, bool with_gauss) {
  double v = T.coeff.value();
  if (T.t_pow2 != 0) v *= std::pow(t, 0.5 * T.t_pow2);
  double expo = 0.0;
  if (T.m2_coeff != 0) expo -= 0.25 * T.m2_coeff * t;
  if (T.gauss && with_gauss) expo -= r * r / (4.0 * t);
  if (T.r_pow != 0) v *= std::pow(r, T.r_pow);
  if (T.coth_pow != 0) v *= std::pow(1.0 / std::tanh(r), T.coth_pow);
  if (T.csch_pow != 0) {
    // csch^k = (2 e^-r / (1 - e^-2r))^k, folded into the exponent for large r
    expo -= T.csch_pow * r;
    v *= std::pow(2.0 / -std::expm1(-2.0 * r), T.csch_pow);
  }
  if (T.bessel_order_shift) {
    const double nu = S.bessel_base_order.value() + *T.bessel_order_shift;
    const double c = S.bessel_scale.value();
    v *= std::pow(c, T.scale_pow) * std::pow(r, -nu) * specfun::bessel_k(nu, c * r);
  }
  return v * std::exp(expo);
}

}  // namespace

double TermSum::eval(double r, double t) const {
  double acc = 0.0;
  for (const auto& T : terms) acc += eval_term(T, *this, r, t, true);
  return acc;
}

double TermSum::eval_without_gauss(double r, double t) const {
  double acc = 0.0;
  for (const auto& T : terms) acc += eval_term(T, *this, r, t, false);
  return acc;
}

TermSum heat_seed(int m) {
  RadialTerm T;
  T.m2_coeff = 4 * m * m;
  T.gauss = true;
  TermSum s;
  s.terms = {T};
  return s;
}

TermSum bessel_seed(double nu, double c) {
  RadialTerm T;
  T.bessel_order_shift = 0;
  TermSum s;
  s.terms = {T};
  s.bessel_base_order = nu;
  s.bessel_scale = c;
  return s;
}

// --- heat kernel ---------------------------------------------------------------

double heat_kernel_scaled(int n, double r, double t, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "heat_kernel");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("heat_kernel: r must be >= 0");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat_kernel: t must be > 0");
  return (n % 2) ? odd_heat_scaled(n, r, t) : even_heat_scaled(n, r, t, cfg);
}

double heat_kernel(int n, double r, double t, const quad::QuadratureConfig& cfg) {
  if (!(t > 0.0) || !(r >= 0.0)) throw DomainError("heat_kernel: need r >= 0 and t > 0");
  const double e = r * r / (4.0 * t);
  if (e > 745.0) return 0.0;
  return heat_kernel_scaled(n, r, t, cfg) * std::exp(-e);
}

double dm_envelope_scaled(int n, double r, double t) {
  require_dimension(n, "dm_envelope");
  if (!(t > 0.0) || !(r >= 0.0)) throw DomainError("dm_envelope: need r >= 0 and t > 0");
  const double k = n - 1.0;
  return std::pow(t, -0.5 * n) * std::exp(-k * k * t / 4.0 - k * r / 2.0) * std::pow(1.0 + r + t, 0.5 * (n - 3)) *
         (1.0 + r);
}

double dm_envelope(int n, double r, double t) { return dm_envelope_scaled(n, r, t) * std::exp(-r * r / (4.0 * t)); }

RatioScan dm_ratio_scan(int n, const std::vector<double>& r_grid, const std::vector<double>& t_grid,
                        const quad::QuadratureConfig& cfg) {
  if (r_grid.empty() || t_grid.empty()) throw DomainError("dm_ratio_scan: empty grid");
  RatioScan out{std::numeric_limits<double>::infinity(), 0.0};
  for (double r : r_grid) {
    if (r < 0.0 || r > 10.0) throw DomainError("dm_ratio_scan: r outside [0, 10]");
    for (double t : t_grid) {
      if (t < 0.01 || t > 10.0) throw DomainError("dm_ratio_scan: t outside [0.01, 10]");
      const double q = heat_kernel_scaled(n, r, t, cfg) / dm_envelope_scaled(n, r, t);
      out.ratio_min = std::min(out.ratio_min, q);
      out.ratio_max = std::max(out.ratio_max, q);
    }
  }
  return out;
}

double heat_mass(int n, double t, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "heat_mass");
  auto g = [&](double r) { return with_volume(heat_kernel(n, r, t, cfg), n, r); };
  const double sq = std::sqrt(t);
  std::vector<double> pts{0.0, sq, 2 * sq, 4 * sq};
  const double drift = (n - 1.0) * t;
  for (double k : {-6.0, -3.0, 0.0, 3.0, 6.0}) {
    const double p = drift + k * std::sqrt(2.0 * t);
    if (p > 0.0) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 1e-14;
  c.rel_tol = 1e-12;
  double v = quad::integrate_panels(g, pts, c).checked("heat_mass");
  v += quad::integrate_semiinfinite(g, pts.back(), c).checked("heat_mass tail");
  return sphere_area(n) * v;
}

ChapmanKolmogorov chapman_kolmogorov(int n, double t, double s, double d, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "chapman_kolmogorov");
  auto profile = [&](double rho) { return heat_kernel(n, rho, s, cfg); };
  const double inf = std::numeric_limits<double>::infinity();
  auto g = [&](double r) {
    return with_volume(heat_kernel(n, r, t, cfg), n, r) * sphere_mean_impl(n, profile, inf, {}, d, r, cfg);
  };
  std::vector<double> pts{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  if (d > 0.0) pts.push_back(d);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 1e-13;
  c.rel_tol = 1e-10;
  double v = quad::integrate_panels(g, pts, c).checked("chapman_kolmogorov");
  v += quad::integrate_semiinfinite(g, pts.back(), c).checked("chapman_kolmogorov tail");
  return {sphere_area(n) * v, heat_kernel(n, d, t + s, cfg)};
}

// --- kernels -------------------------------------------------------------------

const char* route_name(KernelRoute r) {
  switch (r) {
    case KernelRoute::time_quadrature:
      return "time_quadrature";
    case KernelRoute::bessel_closed_form:
      return "bessel_closed_form";
    case KernelRoute::term_algebra:
      return "term_algebra";
  }
  return "?";
}

const char* kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::heat:
      return "heat";
    case KernelKind::frac:
      return "frac";
    case KernelKind::log1:
      return "log1";
    case KernelKind::log2:
      return "log2";
  }
  return "?";
}

double frac_kernel(int n, double s, double r, KernelRoute route, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "frac_kernel");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("frac_kernel: s must be in (0,1)");
  require_positive_r(r, "frac_kernel");
  cfg.validate();
  if (route == KernelRoute::bessel_closed_form) return bessel_frac_kernel(n, s, r);
  if (route != KernelRoute::time_quadrature) throw RouteMismatch("frac_kernel: route must be time_quadrature or bessel_closed_form");
  const double T = cfg.split_time;
  auto ps = [&](double t) { return heat_kernel_scaled(n, r, t, cfg); };
  return short_time_integral(ps, r, T, -1.0 - s, cfg) + long_time_integral(n, r, T, -1.0 - s, cfg);
}

double log_kernel_1(int n, double r, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "log_kernels");
  require_positive_r(r, "log_kernels");
  auto ps = [&](double t) { return heat_kernel_scaled(n, r, t, cfg); };
  return short_time_integral(ps, r, 1.0, -1.0, cfg);
}

double log_kernel_2(int n, double r, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "log_kernels");
  require_positive_r(r, "log_kernels");
  return long_time_integral(n, r, 1.0, -1.0, cfg);
}

LogKernels log_kernels(int n, double r, const quad::QuadratureConfig& cfg) {
  return {log_kernel_1(n, r, cfg), log_kernel_2(n, r, cfg)};
}

double euclid_log_kernel_1(int n, double r, const quad::QuadratureConfig& cfg) {
  if (n < 1) throw DomainError("euclid_log_kernel_1: n must be >= 1");
  require_positive_r(r, "euclid_log_kernel_1");
  auto ps = [&](double t) { return std::pow(4.0 * kPi * t, -0.5 * n); };
  return short_time_integral(ps, r, 1.0, -1.0, cfg);
}

// --- tables ----------------------------------------------------------------------

bool KernelTable::positive() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
}

bool KernelTable::strictly_decreasing() const {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) return false;
  }
  return true;
}

KernelTable build_kernel_table(KernelKind kind, int n, std::optional<double> s, std::optional<double> t,
                               const std::vector<double>& r_grid, KernelRoute route,
                               const quad::QuadratureConfig& cfg, int workers) {
  require_dimension(n, "build_kernel_table");
  cfg.validate();
  if (r_grid.empty()) throw DomainError("build_kernel_table: empty r grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1]))) {
      throw DomainError("build_kernel_table: r grid must be positive and increasing");
    }
  }
  KernelTable tab;
  tab.kind = kind;
  tab.n = n;
  tab.r_grid = r_grid;
  tab.route = route;
  tab.cfg = cfg;
  std::function<double(double)> eval;
  switch (kind) {
    case KernelKind::heat:
      if (!t || !(*t > 0.0)) throw DomainError("build_kernel_table: heat needs t > 0");
      if (route != KernelRoute::term_algebra) throw RouteMismatch("build_kernel_table: heat uses term_algebra");
      tab.t = t;
      eval = [&](double r) { return heat_kernel(n, r, *t, cfg); };
      break;
    case KernelKind::frac:
      if (!s || !(*s > 0.0 && *s < 1.0)) throw DomainError("build_kernel_table: frac needs s in (0,1)");
      if (route == KernelRoute::term_algebra) throw RouteMismatch("build_kernel_table: frac has no term_algebra route");
      if (route == KernelRoute::bessel_closed_form && n != 3 && n != 5) {
        throw RouteMismatch("build_kernel_table: bessel_closed_form needs n in {3,5}");
      }
      tab.s = s;
      eval = [&](double r) { return frac_kernel(n, *s, r, route, cfg); };
      break;
    case KernelKind::log1:
    case KernelKind::log2:
      if (route != KernelRoute::time_quadrature) throw RouteMismatch("build_kernel_table: log kernels use time_quadrature");
      if (kind == KernelKind::log1) {
        eval = [&](double r) { return log_kernel_1(n, r, cfg); };
      } else {
        eval = [&](double r) { return log_kernel_2(n, r, cfg); };
      }
      break;
  }
  auto fn = [&](std::size_t i) { return eval(r_grid[i]); };
  tab.values = workers <= 1 ? parallel::map_serial(r_grid.size(), fn) : parallel::map(r_grid.size(), fn, workers);
  return tab;
}

void write_table_csv(const KernelTable& table, std::ostream& os) {
  os << "r,value\n";
  for (std::size_t i = 0; i < table.r_grid.size(); ++i) {
    os << io::format_double(table.r_grid[i]) << ',' << io::format_double(table.values[i]) << '\n';
  }
}

std::string table_json_sidecar(const KernelTable& table) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(table.kind);
  j["n"] = table.n;
  j["s"] = table.s ? nlohmann::ordered_json(*table.s) : nlohmann::ordered_json(nullptr);
  j["t"] = table.t ? nlohmann::ordered_json(*table.t) : nlohmann::ordered_json(nullptr);
  j["route"] = route_name(table.route);
  j["rows"] = table.r_grid.size();
  j["tolerances"] = {{"abs_tol", table.cfg.abs_tol},
                     {"rel_tol", table.cfg.rel_tol},
                     {"max_subdivisions", table.cfg.max_subdivisions},
                     {"split_time", table.cfg.split_time}};
  return j.dump();
}

// --- fits ------------------------------------------------------------------------

std::string FitReport::json() const {
  nlohmann::ordered_json j;
  j["regime"] = regime == FitRegime::small_r ? "small_r" : "large_r";
  j["model"] = model == FitModel::power ? "power" : (model == FitModel::power_exp ? "power_exp" : "gaussian_tail");
  j["coefficients"] = coefficients;
  j["residual"] = residual;
  j["points"] = points;
  return j.dump();
}

FitReport asympt_fit(const KernelTable& table, FitRegime regime, FitModel model) {
  std::vector<double> rs, ys;
  for (std::size_t i = 0; i < table.r_grid.size(); ++i) {
    const double r = table.r_grid[i];
    const bool in = regime == FitRegime::small_r ? r <= 0.3 : r >= 3.0;
    if (in && table.values[i] > 0.0) {
      rs.push_back(r);
      ys.push_back(std::log(table.values[i]));
    }
  }
  if (rs.size() < 6) throw DomainError("asympt_fit: need at least 6 points in the regime window");
  const int cols = model == FitModel::power ? 2 : (model == FitModel::power_exp ? 3 : 4);
  Eigen::MatrixXd A(rs.size(), cols);
  Eigen::VectorXd y(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(rs[i]);
    if (cols > 2) A(i, 2) = rs[i];
    if (cols > 3) A(i, 3) = rs[i] * rs[i];
    y(i) = ys[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) throw IllConditioned("asympt_fit: design matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(y);
  const double res = std::sqrt((A * c - y).squaredNorm() / rs.size());
  return {regime, model, std::vector<double>(c.data(), c.data() + c.size()), res, static_cast<int>(rs.size())};
}

// --- functions on H^n --------------------------------------------------------------

void HyperRadialFunction::validate() const {
  if (!profile) throw DomainError("HyperRadialFunction: missing profile");
  if (!(support_radius > 0.0) || !std::isfinite(support_radius)) {
    throw DomainError("HyperRadialFunction: support radius must be finite and > 0");
  }
}

HyperRadialFunction hyper_bump(double radius) {
  if (!(radius > 0.0)) throw DomainError("hyper_bump: radius must be > 0");
  HyperRadialFunction f;
  f.id = "bump";
  f.support_radius = radius;
  f.profile = [radius](double d) {
    const double q = d / radius;
    return q < 1.0 ? std::exp(-1.0 / (1.0 - q * q)) : 0.0;
  };
  return f;
}

HyperRadialFunction hyper_zero() {
  HyperRadialFunction f;
  f.id = "zero";
  f.support_radius = 1.0;
  f.profile = [](double) { return 0.0; };
  return f;
}

double sphere_mean(int n, const HyperRadialFunction& f, double a, double r, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "sphere_mean");
  f.validate();
  if (!(a >= 0.0) || !(r >= 0.0)) throw DomainError("sphere_mean: distances must be >= 0");
  return sphere_mean_impl(n, f.profile, f.support_radius, f.radial_breaks, a, r, cfg);
}

double log_pointwise_h(int n, const HyperRadialFunction& f, double a, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "log_pointwise_h");
  require_dini(f, "log_pointwise_h");
  if (!(a >= 0.0)) throw DomainError("log_pointwise_h: x_dist must be >= 0");
  const double fx = f.profile(a);
  const double reach = a + f.support_radius;
  const auto oc = outer_cfg(cfg, sup_profile(f));
  auto A = [&](double r) { return sphere_mean_impl(n, f.profile, f.support_radius, f.radial_breaks, a, r, cfg); };
  auto g1 = [&](double r) { return with_volume(log_kernel_1(n, r, cfg), n, r) * (fx - A(r)); };
  auto g2 = [&](double r) { return with_volume(log_kernel_2(n, r, cfg), n, r) * A(r); };
  const auto pts = radial_points(f, a, 0.0, reach);
  double v = quad::integrate_panels(g1, pts, oc).checked("log_pointwise_h near") -
             quad::integrate_panels(g2, pts, oc).checked("log_pointwise_h far");
  if (fx != 0.0) {
    auto tail = [&](double r) { return with_volume(log_kernel_1(n, r, cfg), n, r); };
    v += fx * quad::integrate_semiinfinite(tail, reach, oc).checked("log_pointwise_h tail");
  }
  return sphere_area(n) * v - specfun::kEulerGamma * fx;
}

double log_bochner_h(int n, const HyperRadialFunction& f, double a, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "log_bochner_h");
  require_dini(f, "log_bochner_h");
  const double fx = f.profile(a);
  const double reach = a + f.support_radius;
  const double S = sphere_area(n);
  const double scale = sup_profile(f);
  auto A = [&](double r) { return sphere_mean_impl(n, f.profile, f.support_radius, f.radial_breaks, a, r, cfg); };
  auto r_points = [&](double t) {
    auto pts = radial_points(f, a, 0.0, reach);
    const double sq = std::sqrt(t);
    for (double k : {2.0, 8.0, 32.0}) {
      if (k * sq < reach) pts.push_back(k * sq);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  };
  quad::QuadratureConfig ic = cfg;
  ic.rel_tol = std::min(cfg.rel_tol, 1e-11);
  // e^-t f(x) - P_t f(x), each piece by radial quadrature; deficit form for t < 1.
  auto integrand = [&](double t) {
    ic.abs_tol = 1e-15 * scale * std::min(t, 1.0);
    const auto pts = r_points(t);
    if (t < 1.0) {
      auto d = [&](double r) { return with_volume(heat_kernel(n, r, t, cfg), n, r) * (fx - A(r)); };
      double D = quad::integrate_panels(d, pts, ic).checked("log_bochner_h deficit");
      if (fx != 0.0) {
        auto m = [&](double r) { return with_volume(heat_kernel(n, r, t, cfg), n, r); };
        D += fx * quad::integrate_semiinfinite(m, reach, ic).checked("log_bochner_h mass tail");
      }
      return (S * D + std::expm1(-t) * fx) / t;
    }
    auto p = [&](double r) { return with_volume(heat_kernel(n, r, t, cfg), n, r) * A(r); };
    const double P = S * quad::integrate_panels(p, pts, ic).checked("log_bochner_h semigroup");
    return (std::exp(-t) * fx - P) / t;
  };
  quad::QuadratureConfig tc = cfg;
  tc.abs_tol = std::min(cfg.abs_tol, 1e-12) * scale;
  tc.rel_tol = std::min(cfg.rel_tol, 1e-9);
  // The integrand is bounded at t = 0; the head below T0 is taken by the midpoint rule.
  constexpr double T0 = 1e-6;
  double v = T0 * integrand(0.5 * T0);
  v += quad::integrate_panels(integrand, {T0, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 4.0, 16.0}, tc).checked("log_bochner_h");
  v += quad::integrate_semiinfinite(integrand, 16.0, tc).checked("log_bochner_h tail");
  return v;
}

RhoH rho_h(int n, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "rho_h");
  auto g = [&](double r) { return with_volume(log_kernel_1(n, r, cfg), n, r); };
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 1e-14;
  c.rel_tol = 1e-12;
  const auto a = quad::integrate_panels(g, {1.0, 2.0, 4.0, 8.0}, c);
  const auto b = quad::integrate_semiinfinite(g, 8.0, c);
  a.checked("rho_h");
  b.checked("rho_h tail");
  const double S = sphere_area(n);
  const double I = S * (a.value + b.value);
  // Inner kernels carry relative error ~1e-11.
  const double err = S * (a.error_estimate + b.error_estimate) + 1e-11 * I;
  return {I - specfun::kEulerGamma, err};
}

double remainder_h(int n, const HyperRadialFunction& f, double a, double rho, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "remainder_h");
  require_dini(f, "remainder_h");
  const double fx = f.profile(a);
  const double reach = a + f.support_radius;
  const auto oc = outer_cfg(cfg, sup_profile(f));
  auto A = [&](double r) { return sphere_mean_impl(n, f.profile, f.support_radius, f.radial_breaks, a, r, cfg); };
  auto k2 = [&](double r) { return with_volume(log_kernel_2(n, r, cfg), n, r) * A(r); };
  auto k1 = [&](double r) { return with_volume(log_kernel_1(n, r, cfg), n, r) * A(r); };
  double v = -quad::integrate_panels(k2, radial_points(f, a, 0.0, std::min(1.0, reach)), oc).checked("remainder K2");
  if (reach > 1.0) v -= quad::integrate_panels(k1, radial_points(f, a, 1.0, reach), oc).checked("remainder K1");
  return sphere_area(n) * v + rho * fx;
}

SplitReport split_check(int n, const HyperRadialFunction& f, double a, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "split_check");
  require_dini(f, "split_check");
  const double fx = f.profile(a);
  const double reach = a + f.support_radius;
  const double S = sphere_area(n);
  const auto oc = outer_cfg(cfg, sup_profile(f));
  auto A = [&](double r) { return sphere_mean_impl(n, f.profile, f.support_radius, f.radial_breaks, a, r, cfg); };
  auto g1 = [&](double r) { return with_volume(log_kernel_1(n, r, cfg), n, r) * (fx - A(r)); };
  auto g2 = [&](double r) { return with_volume(log_kernel_2(n, r, cfg), n, r) * A(r); };
  SplitReport rep{};
  rep.near = S * quad::integrate_panels(g1, radial_points(f, a, 0.0, 1.0), oc).checked("split near");
  rep.far = reach > 1.0 ? -S * quad::integrate_panels(g2, radial_points(f, a, 1.0, reach), oc).checked("split far") : 0.0;
  rep.rho = rho_h(n, cfg).value;
  rep.remainder = remainder_h(n, f, a, rep.rho, cfg);
  rep.full = log_pointwise_h(n, f, a, cfg);
  rep.residual = std::abs(rep.near + rep.far + rep.remainder - rep.full);
  return rep;
}

namespace {

// (|S| int_lo^hi g^q sinh^(n-1))^(1/q), hi may be infinite.
double radial_lq(int n, const std::function<double(double)>& g, double q, double lo, double hi,
                 const quad::QuadratureConfig& cfg) {
  auto h = [&](double r) { return with_volume(std::pow(std::abs(g(r)), q), n, r); };
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 1e-15;
  c.rel_tol = std::min(cfg.rel_tol, 1e-10);
  double v;
  if (std::isfinite(hi)) {
    std::vector<double> pts{lo};
    for (double p : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      if (p > lo && p < hi) pts.push_back(p);
    }
    pts.push_back(hi);
    v = quad::integrate_panels(h, pts, c).checked("radial norm");
  } else {
    v = quad::integrate_panels(h, {lo, 2.0 * lo + 1.0}, c).checked("radial norm") +
        quad::integrate_semiinfinite(h, 2.0 * lo + 1.0, c).checked("radial norm tail");
  }
  return std::pow(sphere_area(n) * v, 1.0 / q);
}

}  // namespace

EnergyReport energy_inequality(int n, const HyperRadialFunction& f, double p, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "energy_inequality");
  require_dini(f, "energy_inequality");
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("energy_inequality: p must be in (1, 2]");
  EnergyReport rep{};
  rep.p = p;
  rep.q = 1.0 / (2.0 - 2.0 / p);
  rep.rho = rho_h(n, cfg).value;
  rep.k2_near_norm = radial_lq(n, [&](double r) { return log_kernel_2(n, r, cfg); }, rep.q, 0.0, 1.0, cfg);
  rep.k1_far_norm = radial_lq(n, [&](double r) { return log_kernel_1(n, r, cfg); }, rep.q, 1.0,
                              std::numeric_limits<double>::infinity(), cfg);
  rep.f_p_norm = radial_lq(n, f.profile, p, 0.0, f.support_radius, cfg);
  rep.f_2_norm = radial_lq(n, f.profile, 2.0, 0.0, f.support_radius, cfg);
  auto g = [&](double a) {
    const double fa = f.profile(a);
    if (fa == 0.0) return 0.0;
    return std::abs(remainder_h(n, f, a, rep.rho, cfg)) * std::abs(fa) * sinh_pow(a, n - 1);
  };
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 1e-12;
  c.rel_tol = 1e-8;
  rep.lhs = sphere_area(n) * quad::integrate(g, 0.0, f.support_radius, {}, c).checked("energy lhs");
  const double fp2 = rep.f_p_norm * rep.f_p_norm, f22 = rep.f_2_norm * rep.f_2_norm;
  rep.rhs_signed = (rep.k2_near_norm + rep.k1_far_norm) * fp2 + rep.rho * f22;
  rep.rhs_abs = (rep.k2_near_norm + rep.k1_far_norm) * fp2 + std::abs(rep.rho) * f22;
  return rep;
}

double weighted_l1_norm(int n, const HyperRadialFunction& f, const quad::QuadratureConfig& cfg) {
  require_dimension(n, "weighted_l1_norm");
  f.validate();
  auto w = [&](double r) { return std::abs(f.profile(r)) * std::exp(-(n - 1.0) * r) / (1.0 + r); };
  return radial_lq(n, w, 1.0, 0.0, f.support_radius, cfg);
}

KernelNormsReport kernel_norms(int n, double p, const std::vector<double>& radii, const HyperRadialFunction* f,
                               const quad::QuadratureConfig& cfg) {
  require_dimension(n, "kernel_norms");
  if (!(p >= 1.0)) throw DomainError("kernel_norms: p must be >= 1");
  if (radii.empty()) throw DomainError("kernel_norms: empty radius list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw DomainError("kernel_norms: radii must be positive and increasing");
    }
  }
  KernelNormsReport rep{};
  rep.n = n;
  rep.p = p;
  rep.radii = radii;
  auto h = [&](double r) { return with_volume(std::pow(log_kernel_2(n, r, cfg), p), n, r); };
  quad::QuadratureConfig c = cfg;
  c.abs_tol = 1e-15;
  c.rel_tol = std::min(cfg.rel_tol, 1e-11);
  double acc = 0.0, lo = 0.0;
  for (double R : radii) {
    std::vector<double> pts{lo};
    for (double b = 0.5; b < R; b *= 2.0) {
      if (b > lo) pts.push_back(b);
    }
    pts.push_back(R);
    acc += quad::integrate_panels(h, pts, c).checked("kernel_norms");
    rep.norms.push_back(std::pow(sphere_area(n) * acc, 1.0 / p));
    lo = R;
  }
  for (std::size_t i = 0; i + 1 < rep.norms.size(); ++i) {
    rep.log_growth.push_back((rep.norms[i + 1] - rep.norms[i]) / std::log(radii[i + 1] / radii[i]));
  }
  const std::size_t k = rep.norms.size();
  rep.last_relative_change = k > 1 ? std::abs(rep.norms[k - 1] - rep.norms[k - 2]) / std::abs(rep.norms[k - 1]) : 0.0;
  if (f) {
    rep.weighted_l1 = weighted_l1_norm(n, *f, cfg);
    if (p > 1.0 && p <= 2.0) rep.energy = energy_inequality(n, *f, p, cfg);
  }
  return rep;
}

}  // namespace loglap::hyperbolic
