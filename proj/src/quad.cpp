#include "loglap/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "loglap/errors.hpp"
#include "loglap/specfun.hpp"

namespace loglap::quad {

namespace {

// Gauss-Kronrod 21-point abscissae and weights (QUADPACK qk21).
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478240, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double eval(const Integrand& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NonFiniteIntegrand("integrand returned " + std::to_string(v) + " at x=" + std::to_string(x));
  }
  return v;
}

Panel gk21(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = eval(f, center);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = eval(f, center - dx);
    const double f2 = eval(f, center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double ah = std::abs(half);
  resk *= half;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs(resk - resg * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  return {a, b, resk, err};
}

QuadResult adapt(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Panel> heap;
  Panel first = gk21(f, a, b);
  out.evaluations = 21;
  double total = first.value;
  double total_err = first.error;
  double frozen_value = 0.0;
  double frozen_err = 0.0;
  heap.push(first);
  int splits = 0;
  auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_err - frozen_err > tolerance()) {
    if (splits >= cfg.max_subdivisions) break;
    Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    // Roundoff floor: too narrow to bisect further.
    if (std::abs(p.b - p.a) <= 64.0 * kEps * std::max(std::abs(mid), std::numeric_limits<double>::min())) {
      frozen_value += p.value;
      frozen_err += p.error;
      continue;
    }
    Panel l = gk21(f, p.a, mid);
    Panel r = gk21(f, mid, p.b);
    out.evaluations += 42;
    ++splits;
    total += l.value + r.value - p.value;
    total_err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  double sum = frozen_value;
  double err = frozen_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error_estimate = err;
  out.converged = (err - frozen_err) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(sum));
  return out;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("QuadratureConfig: tolerances must be > 0");
  if (max_subdivisions < 1) throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
  if (!(split_time > 0.0)) throw DomainError("QuadratureConfig: split_time must be > 0");
}

double QuadResult::checked(const char* what) const {
  if (!converged) {
    throw NonConvergence(std::string(what) + ": quadrature budget exhausted", value, error_estimate);
  }
  return value;
}

void SingularityHint::validate() const {
  if ((kind == SingularityKind::none) != (endpoint == Endpoint::none)) {
    throw DomainError("SingularityHint: kind is none iff endpoint is none");
  }
}

QuadResult integrate(const Integrand& f, double a, double b, SingularityHint hint,
                     const QuadratureConfig& cfg) {
  // abs_tol may legitimately be 0 internally (relative-only kernel work).
  if (!(cfg.abs_tol >= 0.0) || !(cfg.rel_tol >= 0.0) || cfg.max_subdivisions < 1) {
    throw DomainError("integrate: invalid QuadratureConfig");
  }
  hint.validate();
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw DomainError("integrate: need finite a < b");
  const double w = b - a;
  switch (hint.kind) {
    case SingularityKind::none:
      return adapt(f, a, b, cfg);
    case SingularityKind::inverse_sqrt:
      if (hint.endpoint == Endpoint::lower) {
        return adapt([&](double u) { return 2.0 * u * f(a + u * u); }, 0.0, std::sqrt(w), cfg);
      }
      return adapt([&](double u) { return 2.0 * u * f(b - u * u); }, 0.0, std::sqrt(w), cfg);
    case SingularityKind::log:
      if (hint.endpoint == Endpoint::lower) {
        return adapt([&](double u) { return 3.0 * w * u * u * f(a + w * u * u * u); }, 0.0, 1.0, cfg);
      }
      return adapt([&](double u) { return 3.0 * w * u * u * f(b - w * u * u * u); }, 0.0, 1.0, cfg);
  }
  return {};
}

QuadResult integrate_semiinfinite(const Integrand& f, double a, const QuadratureConfig& cfg) {
  if (!std::isfinite(a)) throw DomainError("integrate_semiinfinite: a must be finite");
  return integrate(
      [&](double u) {
        const double t = a - 1.0 + 1.0 / u;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v / (u * u);
      },
      0.0, 1.0, {}, cfg);
}

QuadResult integrate_power_tail(const Integrand& f, double a, double decay, const QuadratureConfig& cfg) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("integrate_power_tail: a must be > 0");
  if (!(decay > 0.0)) throw DomainError("integrate_power_tail: decay must be > 0");
  const double p = 1.0 / decay;
  return integrate(
      [&](double w) {
        const double lw = std::log(w);
        const double t = a * std::exp(-p * lw);
        if (!std::isfinite(t)) return 0.0;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v * a * p * std::exp(-(p + 1.0) * lw);
      },
      0.0, 1.0, {}, cfg);
}

QuadResult integrate_panels(const Integrand& f, const std::vector<double>& points, const QuadratureConfig& cfg) {
  if (points.size() < 2) throw DomainError("integrate_panels: need at least two points");
  QuadResult out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] == points[i + 1]) continue;
    const QuadResult r = integrate(f, points[i], points[i + 1], {}, cfg);
    out.value += r.value;
    out.error_estimate += r.error_estimate;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  return g;
}

double frullani_log(double lambda, const QuadratureConfig& cfg) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("frullani_log: lambda must be > 0");
  cfg.validate();
  const double T = cfg.split_time;
  // Factor out the slower exponential and use expm1 so small t stays exact.
  const double m = std::min(1.0, lambda);
  const double d = std::abs(lambda - 1.0);
  const double sign = lambda > 1.0 ? 1.0 : -1.0;
  auto g = [=](double t) {
    if (t == 0.0) return lambda - 1.0;
    return -sign * std::exp(-m * t) * std::expm1(-d * t) / t;
  };
  // Fine panels near 0 when lambda is large: the integrand varies on scale 1/lambda.
  std::vector<double> pts{0.0};
  for (double edge = std::min(T, 1.0 / lambda); edge < T; edge *= 8.0) pts.push_back(edge);
  pts.push_back(T);
  const double head = integrate_panels(g, pts, cfg).checked("frullani_log");
  const double tail = integrate_semiinfinite(g, T, cfg).checked("frullani_log");
  return head + tail;
}

ScalarIdentityReport verify_scalar_identities(const std::vector<int>& n_list, const QuadratureConfig& cfg,
                                              int tail_points, double tail_r_max) {
  if (n_list.empty()) throw DomainError("verify_scalar_identities: n_list must be nonempty");
  cfg.validate();
  ScalarIdentityReport rep;

  const double i1 =
      integrate([](double t) { return t == 0.0 ? -1.0 : std::expm1(-t) / t; }, 0.0, 1.0, {}, cfg).checked("I1");
  const double i2 = integrate_semiinfinite([](double t) { return std::exp(-t) / t; }, 1.0, cfg).checked("I2");
  rep.euler_residual = std::abs(i1 + i2 + specfun::kEulerGamma);

  for (int n : n_list) {
    if (n < 1) throw DomainError("verify_scalar_identities: n must be >= 1");
    const double a = 0.5 * n;
    auto density = [a](double t) { return t == 0.0 ? (a == 1.0 ? 1.0 : 0.0) : std::exp((a - 1.0) * std::log(t) - t); };
    const SingularityHint inner_hint = n == 1 ? SingularityHint::inverse_sqrt_at_lower() : SingularityHint{};
    // Outer over s >= 1/4 of (1/2s) int_s^inf.
    auto upper_inner = [&](double s) {
      return integrate_semiinfinite(density, s, cfg).checked("fhzdk inner") / (2.0 * s);
    };
    // Outer over s <= 1/4 of (1/2s) int_0^s.
    auto lower_inner = [&](double s) {
      if (s == 0.0) return 0.0;
      return integrate(density, 0.0, s, inner_hint, cfg).checked("fhzdk inner") / (2.0 * s);
    };
    const double far = integrate_semiinfinite(upper_inner, 0.25, cfg).checked("fhzdk outer");
    const double near =
        integrate(lower_inner, 0.0, 0.25, n == 1 ? SingularityHint::inverse_sqrt_at_lower() : SingularityHint{}, cfg)
            .checked("fhzdk outer");
    const double iterated = far - near;

    auto single_integrand = [&](double t) { return t == 0.0 ? 0.0 : 0.5 * density(t) * std::log(4.0 * t); };
    const double single =
        integrate(single_integrand, 0.0, 0.25,
                  n == 1 ? SingularityHint::inverse_sqrt_at_lower() : SingularityHint::log_at_lower(), cfg)
            .checked("fhzdk single") +
        integrate_semiinfinite(single_integrand, 0.25, cfg).checked("fhzdk single");

    const double g = specfun::gamma(a);
    const double closed = 0.5 * g * specfun::digamma(a) + g * std::log(2.0);
    rep.fhzdk.push_back({n, iterated, single, closed, std::abs(iterated - closed)});
  }

  // The bounds need a = n/2 + s >= 1, i.e. n >= 2.
  for (int n : n_list) {
    if (n < 2) continue;
    for (double s : {0.0, 0.5}) {
      const double r0 = 2.0 * std::sqrt(n - 2.0 + 2.0 * s) + 0.1;
      for (int i = 0; i < tail_points; ++i) {
        const double r = tail_points == 1 ? r0 : r0 + (tail_r_max - r0) * i / (tail_points - 1.0);
        const double base = std::pow(2.0, 2.0 - 2.0 * s - n) * std::pow(r, n + 2.0 * s - 2.0) * std::exp(-r * r / 4.0);
        const double value = specfun::upper_gamma(0.5 * n + s, r * r / 4.0);
        // At n=2, s=0 the lower bound is an equality; allow rounding.
        const double slack = 1e-13 * value;
        GammaTailPoint pt{n, s, r, base, value, 2.0 * base, false};
        pt.holds = (base <= value + slack) && (value <= 2.0 * base + slack);
        rep.gamma_tail_all_hold = rep.gamma_tail_all_hold && pt.holds;
        rep.gamma_tail.push_back(pt);
      }
    }
  }
  return rep;
}

}  // namespace loglap::quad
