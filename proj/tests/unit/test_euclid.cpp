#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "loglap/errors.hpp"
#include "loglap/euclid.hpp"
#include "loglap/quad.hpp"
#include "loglap/specfun.hpp"

using namespace loglap;
using namespace loglap::euclid;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// log(-Delta) f(0) for the Gaussian: chi-square log-moment.
double gaussian_log_at_zero(int n) { return specfun::digamma(0.5 * n) + std::log(2.0); }
double gaussian_frac_at_zero(int n, double s) {
  return std::pow(2.0, s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n);
}

// (2 pi)^{-n} int log|xi|^2 fhat(xi) d xi by radial quadrature.
double fourier_log_oracle(const TestFunction& f) {
  const int n = f.dimension;
  const double area = constants(n).sphere_area;
  auto g = [&](double xi) { return xi == 0.0 ? 0.0 : std::log(xi * xi) * (*f.fourier)(xi) * std::pow(xi, n - 1); };
  quad::QuadratureConfig c;
  c.abs_tol = 1e-14;
  const double v = quad::integrate(g, 0.0, 1.0, quad::SingularityHint::log_at_lower(), c).value +
                   quad::integrate_semiinfinite(g, 1.0, c).value;
  return area * v / std::pow(2.0 * kPi, n);
}

TestFunction zero_function(int n) {
  TestFunction z = make_test_function("bump", n);
  z.id = "zero";
  z.profile = [](double) { return 0.0; };
  return z;
}

std::vector<Point> bump_points(int n) {
  if (n == 1) return {{0.0, 0, 0}, {0.3, 0, 0}, {-0.5, 0, 0}, {0.7, 0, 0}, {0.9, 0, 0}};
  return {{0.0, 0.0, 0}, {0.2, 0.1, 0}, {-0.5, 0.3, 0}, {0.7, 0.0, 0}, {0.1, -0.85, 0}};
}

}  // namespace

TEST_CASE("euclidean constants") {
  CHECK(std::abs(constants(2).c_n - 1.0 / kPi) < 1e-15);
  for (int n = 1; n <= 10; ++n) {
    const auto c = constants(n);
    CHECK(std::abs(c.c_n - 2.0 / c.sphere_area) < 1e-14 * c.c_n);
  }
  CHECK(std::abs(constants(1).rho_n + 2.0 * specfun::kEulerGamma) < 1e-13);
  CHECK(std::abs(constants(2).rho_n - (2.0 * std::log(2.0) - 2.0 * specfun::kEulerGamma)) < 1e-13);
  CHECK(std::abs(constants(2).rho_n - 0.2319) < 1e-4);
  CHECK(std::abs(constants(3).sphere_area - 4.0 * kPi) < 1e-13);
  CHECK_THROWS_AS(constants(0), DomainError);
  CHECK_THROWS_AS(constants(11), DomainError);
}

TEST_CASE("fractional constant matches the heat-semigroup prefactor") {
  for (int n : {1, 2, 3}) {
    for (double s : {0.25, 0.5, 0.75}) {
      const double closed = frac_constant(n, s).c_ns;
      CHECK(rel(frac_constant_bochner(n, s), closed) <= 1e-8);
    }
  }
  // n = 1, s = 1/2: 1/pi.
  CHECK(std::abs(frac_constant(1, 0.5).c_ns - 1.0 / kPi) < 1e-15);
  CHECK_THROWS_AS(frac_constant(2, 1.0), DomainError);
}

TEST_CASE("registry") {
  for (const auto& id : registry_ids()) {
    for (int n : {1, 2, 3}) {
      const auto f = make_test_function(id, n);
      CHECK(f.dimension == n);
      CHECK(std::isfinite(f.eval({0.3, 0.2, 0.1})));
      if (std::isfinite(f.support_radius)) CHECK(f.eval({f.support_radius + 0.01, 0, 0}) == 0.0);
    }
  }
  CHECK_THROWS_AS(make_test_function("unknown", 1), DomainError);
  CHECK_THROWS_AS(make_test_function("bump", 4), DomainError);
  const auto ind = make_test_function("indicator", 1);
  CHECK_THROWS_AS(log_pointwise(ind, {0, 0, 0}), SmoothnessTooLow);
  CHECK_THROWS_AS(frac_pointwise(ind, {0, 0, 0}, 0.5), SmoothnessTooLow);
  CHECK_THROWS_AS(log_bochner_point(ind, {0, 0, 0}), SmoothnessTooLow);
}

TEST_CASE("grid heat semigroup") {
  const auto g = sample(make_test_function("gaussian", 1), 24.0, 256);
  CHECK(max_norm([&] {
          auto d = heat_apply(g, 1e-12);
          for (std::size_t i = 0; i < d.samples.size(); ++i) d.samples[i] -= g.samples[i];
          return d;
        }()) <= 1e-10);
  // Mean is preserved.
  double m0 = 0.0, m1 = 0.0;
  const auto h = heat_apply(g, 3.0);
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    m0 += g.samples[i];
    m1 += h.samples[i];
  }
  CHECK(std::abs(m0 - m1) <= 1e-12 * std::abs(m0));

  const auto c = sample([](const Point&) { return 2.5; }, 2, 3.0, 16);
  for (double v : heat_apply(c, 7.0).samples) CHECK(std::abs(v - 2.5) < 1e-14);

  const double L = 5.0, t = 0.3;
  const auto mode = sample([&](const Point& x) { return std::cos(2 * kPi * x[0] / L); }, 1, L, 32);
  const auto hm = heat_apply(mode, t);
  const double decay = std::exp(-t * std::pow(2 * kPi / L, 2));
  for (std::size_t i = 0; i < hm.samples.size(); ++i) CHECK(std::abs(hm.samples[i] - decay * mode.samples[i]) < 1e-14);
  CHECK_THROWS_AS(heat_apply(mode, 0.0), DomainError);
}

TEST_CASE("log multiplier") {
  // |xi|^2 = 1 on L = 2 pi: killed.
  const auto m1 = sample([](const Point& x) { return std::cos(x[0]); }, 1, 2 * kPi, 32);
  CHECK(max_norm(log_multiplier(m1)) < 1e-14);

  // Exact on eigenmodes.
  const double L = 7.0;
  const auto m3 = sample([&](const Point& x) { return std::sin(2 * kPi * 3 * x[0] / L) * std::cos(2 * kPi * x[1] / L); }, 2, L, 32);
  const double lam = std::pow(2 * kPi / L, 2) * 10.0;
  const auto lm = log_multiplier(m3);
  for (std::size_t i = 0; i < lm.samples.size(); ++i) CHECK(std::abs(lm.samples[i] - std::log(lam) * m3.samples[i]) < 1e-13);

  // Mean mode is annihilated.
  const auto c = sample([](const Point&) { return 1.0; }, 1, 3.0, 8);
  CHECK(max_norm(log_multiplier(c)) == 0.0);

  // Gaussian at 0 in R^n: radial Fourier oracle and chi-square closed form.
  for (int n : {1, 2}) {
    const auto f = make_test_function("gaussian", n);
    const double oracle = fourier_log_oracle(f);
    CHECK(std::abs(oracle - gaussian_log_at_zero(n)) < 1e-10);
    const double v = log_multiplier_rn(f, {{0, 0, 0}}, 24.0, n == 1 ? 512 : 128)[0];
    CHECK(std::abs(v - oracle) <= 1e-4);
  }
}

TEST_CASE("lattice kernels agree with their defining time integrals") {
  // kappa(z) = int_0^inf [L^-n (1 - e^-t) - sum_{m != 0} G_t(z + mL)] / t dt, brute force for n = 1.
  const double L = 6.0;
  auto image_sum = [&](double z, double t) {
    double acc = 0.0;
    for (int m = -60; m <= 60; ++m) {
      if (m == 0) continue;
      const double w = z + m * L;
      acc += std::exp(-w * w / (4 * t)) / std::sqrt(4 * kPi * t);
    }
    return acc;
  };
  // For large t the image sum is L^-1 (1 + 2 sum_k e^{-t xi_k^2} cos) - G_t(z).
  auto image_sum_large = [&](double z, double t) {
    double acc = 1.0;
    for (int k = 1; k <= 40; ++k) acc += 2.0 * std::exp(-t * std::pow(2 * kPi * k / L, 2)) * std::cos(2 * kPi * k * z / L);
    return acc / L - std::exp(-z * z / (4 * t)) / std::sqrt(4 * kPi * t);
  };
  quad::QuadratureConfig c;
  c.abs_tol = 1e-13;
  c.max_subdivisions = 4000;
  for (double z : {0.0, 0.4, 1.7, 2.9}) {
    auto g = [&](double t) {
      const double ims = t < 10.0 ? image_sum(z, t) : image_sum_large(z, t);
      return (-std::expm1(-t) / L - ims) / t;
    };
    const double direct = quad::integrate_panels(g, {0.0, 0.1, 1.0, 10.0, 100.0}, c).value +
                          quad::integrate_semiinfinite(g, 100.0, c).value;
    CHECK(std::abs(torus_log_kernel(1, L, {z, 0, 0}) - direct) < 1e-10);

    for (double s : {0.25, 0.75}) {
      auto h = [&](double t) {
        const double ims = t < 10.0 ? image_sum(z, t) : image_sum_large(z, t);
        return ims * std::pow(t, -1.0 - s);
      };
      const double d = quad::integrate_panels(h, {0.0, 0.1, 1.0, 10.0, 100.0}, c).value +
                       quad::integrate_power_tail(h, 100.0, s, c).value;
      const double expect = -s / std::tgamma(1.0 - s) * d;
      CHECK(std::abs(torus_frac_kernel(1, L, s, {z, 0, 0}) - expect) < 1e-10);
    }
  }
}

TEST_CASE("fractional multiplier") {
  const auto g = sample(make_test_function("gaussian", 1), 24.0, 128);
  const auto lap = neg_laplacian(g);
  const auto near1 = frac_multiplier(g, 0.9999);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    num += std::pow(near1.samples[i] - lap.samples[i], 2);
    den += lap.samples[i] * lap.samples[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-3);

  const auto twice = frac_multiplier(frac_multiplier(g, 0.5), 0.5);
  double diff = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i) diff = std::max(diff, std::abs(twice.samples[i] - lap.samples[i]));
  CHECK(diff <= 1e-10);

  for (int n : {1, 2}) {
    const auto f = make_test_function("gaussian", n);
    for (double s : {0.25, 0.5, 0.75}) {
      const double v = frac_multiplier_rn(f, {{0, 0, 0}}, s, 24.0, n == 1 ? 512 : 128)[0];
      CHECK(std::abs(v - gaussian_frac_at_zero(n, s)) <= 1e-4);
    }
  }
  CHECK_THROWS_AS(frac_multiplier(g, 0.0), DomainError);
  CHECK_THROWS_AS(frac_multiplier(g, 1.0), DomainError);
}

TEST_CASE("pointwise log formula") {
  // Far from the support only the far-field term survives.
  const auto b1 = make_test_function("bump", 1);
  const double x = 3.5;
  const double v = log_pointwise(b1, {x, 0, 0});
  auto g = [&](double y) { return b1.profile(std::abs(y)) / std::abs(x - y); };
  const double oracle = -constants(1).c_n * quad::integrate(g, -1.0, 1.0).value;
  CHECK(v < 0.0);
  CHECK(std::abs(v - oracle) < 1e-10);

  const auto gauss = make_test_function("gaussian", 1);
  CHECK(std::abs(log_pointwise(gauss, {0, 0, 0}) - (-1.2704)) < 1e-3);
  CHECK(std::abs(log_pointwise(gauss, {0, 0, 0}) - gaussian_log_at_zero(1)) < 1e-8);

  for (int n : {1, 2}) {
    const auto b = make_test_function("bump", n);
    const auto pts = bump_points(n);
    const auto mult = log_multiplier_rn(b, pts, 12.0, n == 1 ? 1024 : 512);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(rel(log_pointwise(b, pts[i]), mult[i]) <= 1e-3);
  }
  CHECK(log_pointwise(zero_function(2), {0.1, 0.2, 0}) == 0.0);
}

TEST_CASE("pointwise fractional formula") {
  const auto c = make_test_function("constant", 2);
  CHECK(std::abs(frac_pointwise(c, {0.3, -0.2, 0}, 0.5)) < 1e-12);
  const auto gauss = make_test_function("gaussian", 1);
  CHECK(std::abs(frac_pointwise(gauss, {0, 0, 0}, 0.5) - std::sqrt(2.0 / kPi)) < 1e-3);
  const auto b = make_test_function("bump", 2);
  const auto pts = bump_points(2);
  const auto mult = frac_multiplier_rn(b, pts, 0.25, 12.0, 512);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(rel(frac_pointwise(b, pts[i], 0.25), mult[i]) <= 1e-3);
  CHECK_THROWS_AS(frac_pointwise(b, {0, 0, 0}, 1.5), DomainError);
}

TEST_CASE("bochner routes") {
  // Eigenmode: the time integral of e^{-t} m - e^{t Delta} m reproduces log(lambda) m.
  const double L = 4.0;
  const auto mode = sample([&](const Point& x) { return std::cos(2 * kPi * 2 * x[0] / L); }, 1, L, 16);
  const double lam = std::pow(2 * kPi * 2 / L, 2);
  const std::size_t j = 3;
  auto g = [&](double t) {
    if (t == 0.0) return lam - 1.0;
    return (std::exp(-t) * mode.samples[j] - heat_apply(mode, t).samples[j]) / t / mode.samples[j];
  };
  quad::QuadratureConfig cq;
  const double val = quad::integrate(g, 0.0, 1.0, {}, cq).value + quad::integrate_semiinfinite(g, 1.0, cq).value;
  CHECK(rel(val, std::log(lam)) <= 1e-8);

  const auto b1 = make_test_function("bump", 1);
  CHECK(std::abs(log_bochner_point(b1, {0, 0, 0}) - log_pointwise(b1, {0, 0, 0})) <= 1e-4);
  CHECK(log_bochner_point(zero_function(1), {0.2, 0, 0}) == 0.0);
  CHECK(std::abs(frac_bochner_point(b1, {0, 0, 0}, 0.5) - frac_pointwise(b1, {0, 0, 0}, 0.5)) <= 1e-4);
  CHECK(frac_bochner_point(zero_function(1), {0.2, 0, 0}, 0.5) == 0.0);
  const auto gauss = make_test_function("gaussian", 1);
  CHECK(std::abs(frac_bochner_point(gauss, {0, 0, 0}, 0.5) - std::sqrt(2.0 / kPi)) < 1e-3);

  // Independent of the split time.
  quad::QuadratureConfig other;
  other.split_time = 0.25;
  CHECK(std::abs(log_bochner_point(b1, {0.4, 0, 0}, other) - log_bochner_point(b1, {0.4, 0, 0})) < 1e-8);
}

TEST_CASE("route triangle on registry functions") {
  for (const char* id : {"gaussian", "bump", "plateau"}) {
    for (int n : {1, 2}) {
      const auto f = make_test_function(id, n);
      const double L = std::string(id) == "gaussian" ? 24.0 : 12.0;
      const int N = n == 1 ? 1024 : (std::string(id) == "gaussian" ? 128 : 512);
      const std::vector<Point> pts{{0.0, 0.0, 0.0}, {0.35, 0.0, 0.0}};
      const auto mult = log_multiplier_rn(f, pts, L, N);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double p = log_pointwise(f, pts[i]);
        const double b = log_bochner_point(f, pts[i]);
        INFO(id << " n=" << n << " i=" << i);
        CHECK(rel(p, mult[i]) <= 2e-3);
        CHECK(rel(b, mult[i]) <= 2e-3);
        CHECK(rel(p, b) <= 2e-3);
      }
    }
  }
}

TEST_CASE("linearity of the routes") {
  const auto g = sample(make_test_function("gaussian", 1), 24.0, 128);
  const auto b = sample(make_test_function("bump", 1), 24.0, 128);
  auto combo = g;
  for (std::size_t i = 0; i < combo.samples.size(); ++i) combo.samples[i] = 2.0 * g.samples[i] - 0.5 * b.samples[i];
  for (auto op : {+[](const PeriodicGridFunction& x) { return log_multiplier(x); },
                  +[](const PeriodicGridFunction& x) { return frac_multiplier(x, 0.3); },
                  +[](const PeriodicGridFunction& x) { return heat_apply(x, 0.7); }}) {
    const auto lhs = op(combo);
    const auto rg = op(g), rb = op(b);
    double d = 0.0;
    for (std::size_t i = 0; i < lhs.samples.size(); ++i) {
      d = std::max(d, std::abs(lhs.samples[i] - (2.0 * rg.samples[i] - 0.5 * rb.samples[i])));
    }
    CHECK(d <= 1e-12);
  }
  // Pointwise route: f -> 3 f scales the output.
  auto f = make_test_function("bump", 1);
  auto f3 = f;
  f3.profile = [p = f.profile](double r) { return 3.0 * p(r); };
  CHECK(std::abs(log_pointwise(f3, {0.2, 0, 0}) - 3.0 * log_pointwise(f, {0.2, 0, 0})) < 1e-12);
}

TEST_CASE("s-limits on the torus") {
  const auto b = make_test_function("bump", 1);
  const auto rep = limits_report(b, {0.2, 0.1, 0.05, 0.02}, 8.0, 256);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].e0 < rep.rows[i - 1].e0);
  const auto near1 = limits_report(b, {1e-4}, 8.0, 256);
  CHECK(near1.rows[0].e1 <= 1e-3 * near1.laplacian_norm);
  const auto q = limits_report(b, {0.1, 0.05, 0.01}, 8.0, 256);
  for (std::size_t i = 1; i < q.rows.size(); ++i) {
    const double ratio = (q.rows[i].q / q.rows[i].s) / (q.rows[i - 1].q / q.rows[i - 1].s);
    CHECK(ratio >= 1.0 / 3.0);
    CHECK(ratio <= 3.0);
  }
  CHECK(q.bridge_constant > 0.0);
  for (const auto& r : q.rows) CHECK(r.q <= q.bridge_constant * r.s * (1 + 1e-12));
}

TEST_CASE("grid serialization") {
  const auto g = sample([](const Point& x) { return x[0] + 10 * x[1]; }, 2, 2.0, 2);
  std::ostringstream os;
  write_grid_csv(g, os);
  CHECK(os.str() == "x,y,value\n-1,-1,-11\n-1,0,-1\n0,-1,-10\n0,0,0\n");
  CHECK(grid_json_header(g) == "{\"n\":2,\"L\":2,\"N\":2}");

  PeriodicGridFunction bad = g;
  bad.samples.pop_back();
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = g;
  bad.N = 3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
