#include <cmath>
#include <algorithm>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "loglap/errors.hpp"
#include "loglap/hyperbolic.hpp"
#include "loglap/specfun.hpp"

using namespace loglap;
using namespace loglap::hyperbolic;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double p3_closed(double r, double t) {
  const double ratio = r == 0.0 ? 1.0 : r / std::sinh(r);
  return std::pow(4.0 * kPi * t, -1.5) * ratio * std::exp(-t - r * r / (4.0 * t));
}

// D g = g'(r)/sinh r by a fourth-order central difference.
double numeric_D(const std::function<double(double)>& g, double r, double h) {
  const double d = (-g(r + 2 * h) + 8 * g(r + h) - 8 * g(r - h) + g(r - 2 * h)) / (12 * h);
  return d / std::sinh(r);
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

}  // namespace

TEST_CASE("rational coefficients") {
  const Rational a(2, -4);
  CHECK(a.num == -1);
  CHECK(a.den == 2);
  CHECK((a + Rational(1, 3)) == Rational(-1, 6));
  CHECK((a * Rational(-4)) == Rational(2));
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("term algebra is closed under D") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pw(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    TermSum s;
    for (int k = 0; k < 3; ++k) {
      RadialTerm T;
      T.coeff = Rational(pw(rng) + 1, pw(rng) + 1);
      T.r_pow = pw(rng);
      T.coth_pow = pw(rng);
      T.csch_pow = pw(rng);
      T.gauss = k != 1;
      T.t_pow2 = -pw(rng);
      T.m2_coeff = 4;
      s.terms.push_back(T);
    }
    const auto d = s.derivative();
    const double t = 0.7;
    for (double r : {0.6, 1.3, 2.5}) {
      const double num = numeric_D([&](double x) { return s.eval(x, t); }, r, 1e-3);
      CHECK(rel(d.eval(r, t), num) <= 1e-6);
    }
  }
  // Bessel factors shift order.
  const auto b = bessel_seed(0.75, 2.0);
  const auto db = b.derivative();
  for (double r : {0.5, 1.0, 3.0}) {
    const double num = numeric_D([&](double x) { return b.eval(x, 0.0); }, r, 1e-3);
    CHECK(rel(db.eval(r, 0.0), num) <= 1e-6);
    CHECK(rel(b.eval(r, 0.0), std::pow(r, -0.75) * specfun::bessel_k(0.75, 2.0 * r)) <= 1e-14);
  }
  REQUIRE(db.terms.size() == 1);
  CHECK(db.terms[0].bessel_order_shift == 1);
  CHECK(db.terms[0].csch_pow == 1);
}

TEST_CASE("odd-dimension heat kernels") {
  // n = 3 against the hand-derived closed form.
  CHECK(rel(heat_kernel(3, 1.0, 0.5), p3_closed(1.0, 0.5)) <= 1e-12);
  for (double r : {0.0, 1e-4, 0.3, 1.0, 4.0}) {
    for (double t : {0.05, 2.0}) CHECK(rel(heat_kernel(3, r, t), p3_closed(r, t)) <= 1e-12);
  }
  // n = 5 against nested numerical differentiation of the seed exponential.
  for (double r : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    for (double t : {0.2, 0.5, 1.0, 3.0}) {
      auto g = [&](double x) { return std::exp(-4.0 * t - x * x / (4.0 * t)); };
      auto Dg = [&](double x) { return numeric_D(g, x, 1e-3); };
      const double num = numeric_D(Dg, r, 1e-3) / (std::pow(2.0 * kPi, 2) * std::sqrt(4.0 * kPi * t));
      CHECK(rel(heat_kernel(5, r, t), num) <= 1e-6);
    }
  }
  // Small-time Euclidean limit.
  const double t = 1e-4, r = 0.5;
  const double scaled = heat_kernel(3, r, t) * std::pow(4 * kPi * t, 1.5) * std::exp(r * r / (4 * t));
  CHECK(rel(scaled, r / std::sinh(r)) <= 1e-3);

  // The series used near r = 0 continues the term algebra.
  const auto D2 = heat_seed(2).derivative().derivative();
  for (double rr : {0.05, 0.1, 0.19}) {
    const double ta = D2.eval(rr, 1.0) / (std::pow(2.0 * kPi, 2) * std::sqrt(4.0 * kPi));
    CHECK(rel(heat_kernel(5, rr, 1.0), ta) <= 1e-9);
  }
}

TEST_CASE("heat kernel mass and semigroup") {
  for (int n : {2, 3, 4, 5}) {
    for (double t : {0.1, 1.0, 10.0}) CHECK(std::abs(heat_mass(n, t) - 1.0) <= 1e-8);
  }
  for (double d : {0.0, 1.0, 2.0}) {
    const auto ck = chapman_kolmogorov(3, 0.5, 0.5, d);
    CHECK(std::abs(ck.lhs - ck.rhs) <= 1e-6);
  }
  const auto ck2 = chapman_kolmogorov(2, 0.3, 0.7, 1.0);
  CHECK(std::abs(ck2.lhs - ck2.rhs) <= 1e-6);
  // Even n continuous at r = 0.
  for (int n : {2, 4}) CHECK(rel(heat_kernel(n, 1e-5, 0.4), heat_kernel(n, 0.0, 0.4)) <= 1e-8);
  CHECK(heat_kernel(3, 40.0, 0.01) == 0.0);
  CHECK(heat_kernel_scaled(3, 40.0, 0.01) > 0.0);
  CHECK_THROWS_AS(heat_kernel(6, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(heat_kernel(3, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(dm_envelope(3, -1.0, 1.0), DomainError);
}

TEST_CASE("Davies-Mandouvalos envelope") {
  CHECK(std::abs(dm_envelope(3, 0.0, 1.0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(dm_envelope(2, 1.0, 1.0) - std::exp(-1.0) * 2.0 / std::sqrt(3.0)) < 1e-15);
  for (int n : {2, 3, 4, 5}) {
    for (double r = 0.0; r <= 10.0; r += 0.5) CHECK(dm_envelope(n, r, 0.7) > 0.0);
    CHECK(dm_envelope(n, 10.0, 0.7) < 1e-10 * dm_envelope(n, 0.0, 0.7));
  }
  const auto rg = linspace(0.0, 10.0, 30);
  const auto tg = logspace(0.01, 10.0, 30);
  const auto s3 = dm_ratio_scan(3, rg, tg);
  CHECK(s3.constant() <= 10.0);
  const auto s2 = dm_ratio_scan(2, rg, tg);
  CHECK(s2.ratio_min > 0.0);
  CHECK(std::isfinite(s2.ratio_max));
  // A coarser grid is a subset: its range is contained in the fine one.
  std::vector<double> rc, tc;
  for (std::size_t i = 0; i < rg.size(); i += 3) rc.push_back(rg[i]);
  for (std::size_t i = 0; i < tg.size(); i += 3) tc.push_back(tg[i]);
  const auto c3 = dm_ratio_scan(3, rc, tc);
  CHECK(c3.ratio_min >= s3.ratio_min);
  CHECK(c3.ratio_max <= s3.ratio_max);
  CHECK_THROWS_AS(dm_ratio_scan(3, {11.0}, {1.0}), DomainError);
}

TEST_CASE("fractional kernel routes") {
  for (int n : {3, 5}) {
    for (double s : {0.25, 0.5, 0.75}) {
      for (double r : {0.5, 1.0, 2.0, 4.0}) {
        const double a = frac_kernel(n, s, r, KernelRoute::time_quadrature);
        const double b = frac_kernel(n, s, r, KernelRoute::bessel_closed_form);
        CHECK(rel(a, b) <= 1e-7);
      }
    }
  }
  // n = 3 by hand: 2^(s-1/2) pi^(-3/2) (r/sinh r) r^(-s-3/2) K_(s+3/2)(r).
  const double s = 0.5, r = 1.0;
  const double hand = std::pow(2.0, s - 0.5) * std::pow(kPi, -1.5) * (r / std::sinh(r)) * std::pow(r, -s - 1.5) *
                      specfun::bessel_k(s + 1.5, r);
  CHECK(rel(frac_kernel(3, s, r), hand) <= 1e-9);

  CHECK_THROWS_AS(frac_kernel(2, 0.5, 1.0, KernelRoute::bessel_closed_form), RouteMismatch);
  CHECK_THROWS_AS(frac_kernel(3, 0.5, 1.0, KernelRoute::term_algebra), RouteMismatch);
  CHECK_THROWS_AS(frac_kernel(3, 1.0, 1.0), DomainError);

  for (int n : {2, 3}) {
    double prev = INFINITY;
    for (double rr : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double v = frac_kernel(n, 0.5, rr);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
    const double a = frac_kernel(n, 0.5, 1e-2) * std::pow(1e-2, n + 1.0);
    const double b = frac_kernel(n, 0.5, 1e-3) * std::pow(1e-3, n + 1.0);
    CHECK(rel(a, b) <= 0.03);
  }
}

TEST_CASE("logarithmic kernels") {
  const double oracle = std::pow(kPi, -1.5) * specfun::upper_gamma(1.5, 0.25);
  CHECK(std::abs(euclid_log_kernel_1(3, 1.0) - oracle) <= 1e-10);
  for (int n : {2, 3, 4, 5}) {
    double p1 = INFINITY, p2 = INFINITY;
    for (double r : {0.05, 0.2, 0.5, 1.0, 2.0, 5.0}) {
      const auto k = log_kernels(n, r);
      CHECK(k.k1 > 0.0);
      CHECK(k.k2 > 0.0);
      CHECK(k.k1 < p1);
      CHECK(k.k2 < p2);
      p1 = k.k1;
      p2 = k.k2;
    }
  }
  // Their sum is the full time integral of p/t.
  auto g = [](double t) { return heat_kernel(3, 0.8, t) / t; };
  quad::QuadratureConfig c;
  c.abs_tol = 1e-14;
  const double direct = quad::integrate(g, 0.0, 1.0, {}, c).value + quad::integrate_semiinfinite(g, 1.0, c).value;
  const auto k = log_kernels(3, 0.8);
  CHECK(rel(k.k1 + k.k2, direct) <= 1e-9);

  // Exponential decay rate already near n - 1 = 2 on [2, 4].
  const double rate = std::log(log_kernel_2(3, 2.0) / log_kernel_2(3, 4.0)) / 2.0;
  CHECK(rate > 1.5);
  CHECK(rate < 2.5);

  // r e^{2r} K2(r) against an independent mpmath quadrature; it only settles past r ~ 4.
  auto scaled = [](double r) { return log_kernel_2(3, r) * r * std::exp(2.0 * r); };
  CHECK(rel(scaled(2.0) / scaled(4.0), 0.262411824990340) <= 1e-7);
  CHECK(rel(scaled(8.0) / scaled(4.0), 1.16072854810730) <= 1e-7);
  CHECK(rel(scaled(16.0) / scaled(4.0), 1.09631764111889) <= 1e-7);
}

TEST_CASE("kernel tables and fits") {
  quad::QuadratureConfig cfg;
  const auto grid = logspace(0.1, 8.0, 64);
  const auto serial = build_kernel_table(KernelKind::log2, 3, {}, {}, grid, KernelRoute::time_quadrature, cfg, 1);
  const auto par = build_kernel_table(KernelKind::log2, 3, {}, {}, grid, KernelRoute::time_quadrature, cfg, 4);
  CHECK(serial.values == par.values);
  CHECK(serial.positive());
  CHECK(serial.strictly_decreasing());

  std::ostringstream os;
  write_table_csv(serial, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("r,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
  const std::string js = table_json_sidecar(serial);
  CHECK(js.find("\"kind\":\"log2\"") != std::string::npos);
  CHECK(js.find("\"route\":\"time_quadrature\"") != std::string::npos);
  CHECK(js.find("\"tolerances\"") != std::string::npos);

  const auto heat = build_kernel_table(KernelKind::heat, 4, {}, 0.5, linspace(0.1, 5.0, 12), KernelRoute::term_algebra, cfg, 1);
  CHECK(heat.strictly_decreasing());
  CHECK_THROWS_AS(build_kernel_table(KernelKind::heat, 3, {}, {}, grid, KernelRoute::term_algebra, cfg, 1), DomainError);
  CHECK_THROWS_AS(build_kernel_table(KernelKind::frac, 3, 1.5, {}, grid, KernelRoute::time_quadrature, cfg, 1), DomainError);
  CHECK_THROWS_AS(build_kernel_table(KernelKind::frac, 4, 0.5, {}, grid, KernelRoute::bessel_closed_form, cfg, 1),
                  RouteMismatch);

  const double s = 0.5;
  const auto small = build_kernel_table(KernelKind::frac, 3, s, {}, logspace(1e-3, 0.05, 10), KernelRoute::time_quadrature, cfg, 1);
  const auto fs = asympt_fit(small, FitRegime::small_r, FitModel::power);
  CHECK(rel(fs.log_coefficient(), -(3 + 2 * s)) <= 0.02);
  const auto large = build_kernel_table(KernelKind::frac, 3, s, {}, linspace(40.0, 160.0, 12), KernelRoute::bessel_closed_form, cfg, 1);
  const auto fl = asympt_fit(large, FitRegime::large_r, FitModel::power_exp);
  CHECK(rel(fl.linear_coefficient(), -2.0) <= 0.02);
  CHECK(rel(fl.log_coefficient(), -(1 + s)) <= 0.10);
  CHECK(fl.json().find("\"model\":\"power_exp\"") != std::string::npos);

  const auto k1 = build_kernel_table(KernelKind::log1, 3, {}, {}, linspace(6.0, 20.0, 12), KernelRoute::time_quadrature, cfg, 1);
  CHECK(rel(asympt_fit(k1, FitRegime::large_r, FitModel::gaussian_tail).quadratic_coefficient(), -0.25) <= 0.02);

  // Three distinct radii cannot determine four coefficients.
  KernelTable deg;
  deg.r_grid = {3.0, 3.0, 4.0, 4.0, 5.0, 5.0};
  deg.values = {1.0, 1.0, 0.5, 0.5, 0.2, 0.2};
  CHECK_THROWS_AS(asympt_fit(deg, FitRegime::large_r, FitModel::gaussian_tail), IllConditioned);
  CHECK_THROWS_AS(asympt_fit(small, FitRegime::large_r, FitModel::power), DomainError);
}

TEST_CASE("pointwise logarithmic Laplacian on H^3") {
  const auto f = hyper_bump();
  CHECK(log_pointwise_h(3, hyper_zero(), 0.4) == 0.0);
  CHECK(log_pointwise_h(3, f, 8.0) < 0.0);
  for (double a : {0.0, 0.5, 2.0}) {
    const double p = log_pointwise_h(3, f, a);
    const double b = log_bochner_h(3, f, a);
    CHECK(rel(p, b) <= 1e-3);
  }
  auto rough = f;
  rough.smoothness = euclid::Smoothness::holder(0.0);
  CHECK_THROWS_AS(log_pointwise_h(3, rough, 0.0), SmoothnessTooLow);
  // Sphere means: center case is the profile itself, and the mean of a constant is that constant.
  CHECK(sphere_mean(3, f, 0.0, 0.3) == f.profile(0.3));
  HyperRadialFunction one;
  one.id = "one";
  one.support_radius = 50.0;
  one.profile = [](double) { return 1.0; };
  CHECK(std::abs(sphere_mean(3, one, 0.7, 1.2) - 1.0) < 1e-13);
  CHECK(std::abs(sphere_mean(2, one, 0.7, 1.2) - 1.0) < 1e-13);
}

TEST_CASE("remainder split and energy bound") {
  const auto f = hyper_bump();
  for (double a : {0.0, 1.0}) {
    const auto rep = split_check(3, f, a);
    CHECK(rep.residual <= 1e-8 * (1.0 + std::abs(rep.full)));
  }
  const auto z = split_check(3, hyper_zero(), 0.2);
  CHECK(z.near == 0.0);
  CHECK(z.far == 0.0);
  CHECK(z.remainder == 0.0);
  CHECK(z.full == 0.0);
  const auto rho = rho_h(3);
  CHECK(std::isfinite(rho.value));
  CHECK(rho.error <= 1e-8);

  const auto e = energy_inequality(3, f, 2.0);
  CHECK(e.q == 1.0);
  CHECK(e.holds_signed());
  CHECK(e.holds_abs());
  CHECK(std::abs(e.k1_far_norm - (e.rho + specfun::kEulerGamma)) < 1e-9);
}

TEST_CASE("integrability of K2") {
  const auto two = kernel_norms(3, 2.0, {20.0, 30.0});
  CHECK(two.last_relative_change < 1e-6);
  const auto one = kernel_norms(3, 1.0, {40.0 / 3.0, 20.0, 30.0});
  REQUIRE(one.log_growth.size() == 2);
  CHECK(rel(one.log_growth[1], one.log_growth[0]) <= 0.2);
  CHECK(one.log_growth[1] > 0.1);

  const auto f = hyper_bump();
  const auto with_f = kernel_norms(3, 1.5, {20.0, 30.0}, &f);
  REQUIRE(with_f.weighted_l1.has_value());
  CHECK(*with_f.weighted_l1 > 0.0);
  CHECK(rel(*with_f.weighted_l1, weighted_l1_norm(3, f)) <= 1e-12);
  CHECK_THROWS_AS(kernel_norms(3, 0.5, {1.0}), DomainError);
}
