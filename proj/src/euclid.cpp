#include "loglap/euclid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "loglap/errors.hpp"
#include "loglap/io.hpp"
#include "loglap/specfun.hpp"

namespace loglap::euclid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// FFTW planning is not thread safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

void check_dim(int n, int lo, int hi, const char* what) {
  if (n < lo || n > hi) throw DomainError(std::string(what) + ": dimension out of range");
}

void check_s(double s, const char* what) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError(std::string(what) + ": s must lie in (0, 1)");
}

double norm(const Point& x, int n) {
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
  return std::sqrt(r2);
}

// Row-major multi-index helpers.
struct Shape {
  int n, N;
  std::size_t total() const {
    std::size_t t = 1;
    for (int i = 0; i < n; ++i) t *= static_cast<std::size_t>(N);
    return t;
  }
  std::array<int, 3> unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = n - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % N);
      flat /= N;
    }
    return idx;
  }
};

int signed_mode(int k, int N) { return k < N / 2 ? k : k - N; }

std::vector<std::complex<double>> forward_fft(const PeriodicGridFunction& g) {
  const std::size_t total = g.size();
  std::vector<std::complex<double>> data(total);
  for (std::size_t i = 0; i < total; ++i) data[i] = g.samples[i];
  int dims[3] = {g.N, g.N, g.N};
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft(g.n, dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return data;
}

void inverse_fft(std::vector<std::complex<double>>& data, int n, int N) {
  int dims[3] = {N, N, N};
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft(n, dims, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
}

double lambda_of(const std::array<int, 3>& idx, int n, int N, double L) {
  double lam = 0.0;
  for (int d = 0; d < n; ++d) {
    const double xi = 2.0 * kPi * signed_mode(idx[d], N) / L;
    lam += xi * xi;
  }
  return lam;
}

// gamma(a, x) / x^a, finite as x -> 0.
double lower_gamma_scaled(double a, double x) {
  if (x < 1e-10) return 1.0 / a - x / (a + 1.0);
  return specfun::lower_gamma(a, x) * std::exp(-a * std::log(x));
}

// Candidate breakpoints of r -> A(r) for a sphere about a point at distance rho.
std::vector<double> radial_breaks(const TestFunction& f, double rho, double lo, double hi) {
  std::vector<double> b{lo, hi};
  std::vector<double> radii = f.radial_breaks;
  if (std::isfinite(f.support_radius)) radii.push_back(f.support_radius);
  for (double rb : radii) {
    for (double c : {std::abs(rho - rb), rho + rb}) {
      if (c > lo && c < hi) b.push_back(c);
    }
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [](double u, double v) { return std::abs(u - v) < 1e-12; }), b.end());
  return b;
}

// Integrate over consecutive panels; the first panel may carry a lower hint.
double integrate_breaks(const quad::Integrand& g, const std::vector<double>& pts, const quad::QuadratureConfig& cfg,
                        quad::SingularityHint first_hint, const char* what) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i] < pts[i + 1])) continue;
    const auto hint = i == 0 ? first_hint : quad::SingularityHint{};
    sum += quad::integrate(g, pts[i], pts[i + 1], hint, cfg).checked(what);
  }
  return sum;
}

void require_dini(const TestFunction& f, const char* what) {
  if (!f.smoothness.dini()) {
    throw SmoothnessTooLow(std::string(what) + ": test function '" + f.id + "' is not Dini continuous");
  }
}

// Reach of the spherical averages about x: A(r) = 0 for r > reach.
double reach(const TestFunction& f, const Point& x) {
  return norm(x, f.dimension) + f.support_radius;
}

}  // namespace

EuclideanConstants constants(int n) {
  check_dim(n, 1, 10, "constants");
  const double a = 0.5 * n;
  EuclideanConstants c{};
  c.n = n;
  c.sphere_area = 2.0 * std::pow(kPi, a) / specfun::gamma(a);
  c.c_n = std::pow(kPi, -a) * specfun::gamma(a);
  c.rho_n = 2.0 * std::log(2.0) + specfun::digamma(a) - specfun::kEulerGamma;
  return c;
}

FracConstant frac_constant(int n, double s) {
  check_dim(n, 1, 10, "frac_constant");
  check_s(s, "frac_constant");
  const double a = 0.5 * n;
  const double c = s * std::pow(4.0, s) * specfun::gamma(a + s) / (std::pow(kPi, a) * specfun::gamma(1.0 - s));
  return {n, s, c};
}

double frac_constant_bochner(int n, double s, const quad::QuadratureConfig& cfg) {
  check_dim(n, 1, 10, "frac_constant_bochner");
  check_s(s, "frac_constant_bochner");
  const double a = 0.5 * n;
  auto g = [=](double t) {
    if (t == 0.0) return 0.0;
    return std::exp(-a * std::log(4.0 * kPi * t) - 0.25 / t - (1.0 + s) * std::log(t));
  };
  auto rel = cfg;
  rel.abs_tol = 0.0;
  const double T = cfg.split_time;
  const double head = quad::integrate_panels(g, {0.0, 0.01 * T, 0.1 * T, T}, rel).checked("frac_constant_bochner");
  const double tail = quad::integrate_power_tail(g, T, a + s, rel).checked("frac_constant_bochner");
  return s / specfun::gamma(1.0 - s) * (head + tail);
}

double TestFunction::eval(const Point& x) const { return profile(norm(x, dimension)); }

std::vector<std::string> registry_ids() { return {"gaussian", "bump", "plateau", "constant", "indicator"}; }

TestFunction make_test_function(const std::string& id, int n) {
  check_dim(n, 1, 3, "make_test_function");
  TestFunction f;
  f.id = id;
  f.dimension = n;
  if (id == "gaussian") {
    // Truncated at 12, where e^{-72} is below double resolution of the sums.
    f.profile = [](double r) { return r >= 12.0 ? 0.0 : std::exp(-0.5 * r * r); };
    f.support_radius = 12.0;
    f.smoothness = Smoothness::smooth();
    f.fourier = [n](double xi) { return std::pow(2.0 * kPi, 0.5 * n) * std::exp(-0.5 * xi * xi); };
  } else if (id == "bump") {
    f.profile = [](double r) { return r >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - r * r)); };
    f.support_radius = 1.0;
    f.smoothness = Smoothness::smooth();
    f.radial_breaks = {1.0};
  } else if (id == "plateau") {
    f.profile = [](double r) {
      if (r <= 0.5) return 1.0;
      if (r >= 1.0) return 0.0;
      return 0.5 * (1.0 + std::cos(kPi * (r - 0.5) / 0.5));
    };
    f.support_radius = 1.0;
    f.smoothness = Smoothness::holder(1.0);
    f.radial_breaks = {0.5, 1.0};
  } else if (id == "constant") {
    f.profile = [](double) { return 1.0; };
    f.support_radius = kInf;
    f.smoothness = Smoothness::smooth();
  } else if (id == "indicator") {
    f.profile = [](double r) { return r < 1.0 ? 1.0 : 0.0; };
    f.support_radius = 1.0;
    f.smoothness = Smoothness::holder(0.0);
    f.radial_breaks = {1.0};
  } else {
    throw DomainError("make_test_function: unknown id '" + id + "'");
  }
  return f;
}

std::size_t PeriodicGridFunction::size() const { return Shape{n, N}.total(); }

Point PeriodicGridFunction::point(std::size_t flat) const {
  const auto idx = Shape{n, N}.unflatten(flat);
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < n; ++d) p[d] = coord(idx[d]);
  return p;
}

void PeriodicGridFunction::validate() const {
  check_dim(n, 1, 3, "PeriodicGridFunction");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("PeriodicGridFunction: L must be > 0");
  if (N < 2 || N % 2 != 0) throw DomainError("PeriodicGridFunction: N must be even and >= 2");
  if (samples.size() != size()) throw DomainError("PeriodicGridFunction: sample count mismatch");
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("PeriodicGridFunction: non-finite sample");
  }
}

PeriodicGridFunction sample(const std::function<double(const Point&)>& f, int n, double L, int N) {
  PeriodicGridFunction g;
  g.n = n;
  g.L = L;
  g.N = N;
  check_dim(n, 1, 3, "sample");
  if (!(L > 0.0) || N < 2 || N % 2 != 0) throw DomainError("sample: need L > 0 and even N >= 2");
  g.samples.resize(g.size());
  for (std::size_t i = 0; i < g.samples.size(); ++i) g.samples[i] = f(g.point(i));
  g.validate();
  return g;
}

PeriodicGridFunction sample(const TestFunction& f, double L, int N) {
  return sample([&f](const Point& x) { return f.eval(x); }, f.dimension, L, N);
}

PeriodicGridFunction apply_symbol(const PeriodicGridFunction& g, const std::function<double(double)>& symbol) {
  g.validate();
  auto data = forward_fft(g);
  const Shape sh{g.n, g.N};
  const double scale = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] *= symbol(lambda_of(sh.unflatten(i), g.n, g.N, g.L)) * scale;
  }
  inverse_fft(data, g.n, g.N);
  PeriodicGridFunction out = g;
  for (std::size_t i = 0; i < data.size(); ++i) out.samples[i] = data[i].real();
  return out;
}

PeriodicGridFunction heat_apply(const PeriodicGridFunction& g, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat_apply: t must be > 0");
  return apply_symbol(g, [t](double lam) { return std::exp(-t * lam); });
}

PeriodicGridFunction log_multiplier(const PeriodicGridFunction& g) {
  return apply_symbol(g, [](double lam) { return lam == 0.0 ? 0.0 : std::log(lam); });
}

PeriodicGridFunction frac_multiplier(const PeriodicGridFunction& g, double s) {
  check_s(s, "frac_multiplier");
  return apply_symbol(g, [s](double lam) { return lam == 0.0 ? 0.0 : std::pow(lam, s); });
}

PeriodicGridFunction neg_laplacian(const PeriodicGridFunction& g) {
  return apply_symbol(g, [](double lam) { return lam; });
}

double l2_norm(const PeriodicGridFunction& g) {
  double s = 0.0;
  for (double v : g.samples) s += v * v;
  return std::sqrt(s * std::pow(g.h(), g.n));
}

double max_norm(const PeriodicGridFunction& g) {
  double m = 0.0;
  for (double v : g.samples) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> interpolate(const PeriodicGridFunction& g, const std::vector<Point>& pts) {
  g.validate();
  const auto data = forward_fft(g);
  const double scale = 1.0 / static_cast<double>(data.size());
  const Shape sh{g.n, g.N};
  std::vector<double> out;
  out.reserve(pts.size());
  for (const Point& x : pts) {
    // Per-axis phases e^{i xi_k (x_d - x_0)}.
    std::vector<std::vector<std::complex<double>>> phase(g.n, std::vector<std::complex<double>>(g.N));
    for (int d = 0; d < g.n; ++d) {
      const double dx = x[d] + 0.5 * g.L;
      for (int k = 0; k < g.N; ++k) {
        const double xi = 2.0 * kPi * signed_mode(k, g.N) / g.L;
        phase[d][k] = std::polar(1.0, xi * dx);
      }
    }
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto idx = sh.unflatten(i);
      std::complex<double> ph = 1.0;
      for (int d = 0; d < g.n; ++d) ph *= phase[d][idx[d]];
      acc += data[i] * ph;
    }
    out.push_back(acc.real() * scale);
  }
  return out;
}

namespace {

struct LatticeSums {
  int n;
  double L;
  std::vector<std::array<int, 3>> images;  // m != 0
  std::vector<std::array<int, 3>> modes;   // k != 0
};

LatticeSums lattice(int n, double L) {
  // Real-space terms decay like e^{-pi |m|^2}, reciprocal ones like e^{-pi |k|^2}.
  constexpr int M = 4;
  LatticeSums ls{n, L, {}, {}};
  const int lo1 = -M, hi1 = M;
  const int lo2 = n >= 2 ? -M : 0, hi2 = n >= 2 ? M : 0;
  const int lo3 = n >= 3 ? -M : 0, hi3 = n >= 3 ? M : 0;
  for (int a = lo1; a <= hi1; ++a)
    for (int b = lo2; b <= hi2; ++b)
      for (int c = lo3; c <= hi3; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if (a * a + b * b + c * c > M * M) continue;
        ls.images.push_back({a, b, c});
        ls.modes.push_back({a, b, c});
      }
  return ls;
}

}  // namespace

double torus_log_kernel(int n, double L, const Point& z) {
  check_dim(n, 1, 3, "torus_log_kernel");
  const LatticeSums ls = lattice(n, L);
  const double a = 0.5 * n;
  const double T0 = L * L / (4.0 * kPi);
  const double Ln = std::pow(L, -n);
  double val = Ln * (std::log(T0) + specfun::kEulerGamma);
  for (const auto& m : ls.images) {
    double w2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const double w = z[d] + m[d] * L;
      w2 += w * w;
    }
    val -= std::pow(kPi, -a) * std::pow(w2, -a) * specfun::upper_gamma(a, kPi * w2 / (L * L));
  }
  for (const auto& k : ls.modes) {
    double dot = 0.0, k2 = 0.0;
    for (int d = 0; d < n; ++d) {
      dot += 2.0 * kPi * k[d] / L * z[d];
      k2 += k[d] * k[d];
    }
    val -= Ln * std::cos(dot) * specfun::exp_integral_e1(kPi * k2);
  }
  const double z2 = z[0] * z[0] + (n > 1 ? z[1] * z[1] : 0.0) + (n > 2 ? z[2] * z[2] : 0.0);
  val += std::pow(4.0 * kPi, -a) * std::pow(T0, -a) * lower_gamma_scaled(a, z2 / (4.0 * T0));
  return val;
}

double torus_frac_kernel(int n, double L, double s, const Point& z) {
  check_dim(n, 1, 3, "torus_frac_kernel");
  check_s(s, "torus_frac_kernel");
  const LatticeSums ls = lattice(n, L);
  const double a = 0.5 * n + s;
  const double T0 = L * L / (4.0 * kPi);
  const double Ln = std::pow(L, -n);
  double sum = Ln * std::pow(T0, -s) / s;
  for (const auto& m : ls.images) {
    double w2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const double w = z[d] + m[d] * L;
      w2 += w * w;
    }
    sum += std::pow(4.0 * kPi, -0.5 * n) * std::pow(0.25 * w2, -a) * specfun::upper_gamma(a, kPi * w2 / (L * L));
  }
  for (const auto& k : ls.modes) {
    double dot = 0.0, k2 = 0.0;
    for (int d = 0; d < n; ++d) {
      dot += 2.0 * kPi * k[d] / L * z[d];
      k2 += k[d] * k[d];
    }
    const double xi2 = 4.0 * kPi * kPi * k2 / (L * L);
    sum += Ln * std::cos(dot) * std::pow(xi2, s) * specfun::upper_gamma_negative(-s, kPi * k2);
  }
  const double z2 = z[0] * z[0] + (n > 1 ? z[1] * z[1] : 0.0) + (n > 2 ? z[2] * z[2] : 0.0);
  sum -= std::pow(4.0 * kPi, -0.5 * n) * std::pow(T0, -a) * lower_gamma_scaled(a, z2 / (4.0 * T0));
  return -s / specfun::gamma(1.0 - s) * sum;
}

namespace {

// int f(y) kappa(x - y) dy as a grid sum over the samples where f is nonzero.
double lattice_correction(const PeriodicGridFunction& g, const Point& x,
                          const std::function<double(const Point&)>& kappa) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    const double fy = g.samples[i];
    if (fy == 0.0 || std::abs(fy) < 1e-18) continue;
    const Point y = g.point(i);
    Point z{0.0, 0.0, 0.0};
    for (int d = 0; d < g.n; ++d) z[d] = x[d] - y[d];
    acc += fy * kappa(z);
  }
  return acc * std::pow(g.h(), g.n);
}

void check_torus_fit(const TestFunction& f, const std::vector<Point>& pts, double L) {
  if (!std::isfinite(f.support_radius)) throw DomainError("multiplier route needs compact support");
  if (L < 2.0 * f.support_radius) throw DomainError("multiplier route: L must be at least the support diameter");
  for (const auto& p : pts) {
    for (int d = 0; d < f.dimension; ++d) {
      if (std::abs(p[d]) >= 0.5 * L) throw DomainError("multiplier route: point outside the periodic cell");
    }
  }
}

}  // namespace

std::vector<double> log_multiplier_rn(const TestFunction& f, const std::vector<Point>& pts, double L, int N) {
  check_torus_fit(f, pts, L);
  const auto g = sample(f, L, N);
  auto vals = interpolate(log_multiplier(g), pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals[i] -= lattice_correction(g, pts[i], [&](const Point& z) { return torus_log_kernel(f.dimension, L, z); });
  }
  return vals;
}

std::vector<double> frac_multiplier_rn(const TestFunction& f, const std::vector<Point>& pts, double s, double L,
                                       int N) {
  check_s(s, "frac_multiplier_rn");
  check_torus_fit(f, pts, L);
  const auto g = sample(f, L, N);
  auto vals = interpolate(frac_multiplier(g, s), pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals[i] -=
        lattice_correction(g, pts[i], [&](const Point& z) { return torus_frac_kernel(f.dimension, L, s, z); });
  }
  return vals;
}

double spherical_average(const TestFunction& f, const Point& x, double r) {
  const int n = f.dimension;
  if (r == 0.0) return f.eval(x);
  if (n == 1) {
    return 0.5 * (f.eval({x[0] + r, 0.0, 0.0}) + f.eval({x[0] - r, 0.0, 0.0}));
  }
  if (n == 2) {
    constexpr int M = 256;
    double acc = 0.0;
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * kPi * j / M;
      acc += f.eval({x[0] + r * std::cos(th), x[1] + r * std::sin(th), 0.0});
    }
    return acc / M;
  }
  // n = 3: Gauss-Legendre in cos(theta) times trapezoid in phi.
  static const quad::GaussRule gl = quad::gauss_legendre(32);
  constexpr int P = 64;
  double acc = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double c = gl.nodes[i];
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    double ring = 0.0;
    for (int j = 0; j < P; ++j) {
      const double ph = 2.0 * kPi * j / P;
      ring += f.eval({x[0] + r * sn * std::cos(ph), x[1] + r * sn * std::sin(ph), x[2] + r * c});
    }
    acc += gl.weights[i] * ring / P;
  }
  return 0.5 * acc;
}

double log_pointwise(const TestFunction& f, const Point& x, const quad::QuadratureConfig& cfg) {
  require_dini(f, "log_pointwise");
  if (!std::isfinite(f.support_radius)) throw DomainError("log_pointwise: needs compact support");
  const int n = f.dimension;
  const auto c = constants(n);
  const double fx = f.eval(x);
  const double rho = norm(x, n);
  const double R = std::max(1.0, reach(f, x) + 1.0);
  auto near = [&](double r) { return (fx - spherical_average(f, x, r)) / r; };
  auto far = [&](double r) { return spherical_average(f, x, r) / r; };
  const double near_val = integrate_breaks(near, radial_breaks(f, rho, 0.0, 1.0), cfg, {}, "log_pointwise");
  const double far_val = integrate_breaks(far, radial_breaks(f, rho, 1.0, R), cfg, {}, "log_pointwise");
  // c_n |S^{n-1}| = 2.
  return 2.0 * near_val - 2.0 * far_val + c.rho_n * fx;
}

double frac_pointwise(const TestFunction& f, const Point& x, double s, const quad::QuadratureConfig& cfg) {
  check_s(s, "frac_pointwise");
  require_dini(f, "frac_pointwise");
  const int n = f.dimension;
  const double fx = f.eval(x);
  const double rho = norm(x, n);
  // Beyond R the spherical mean is taken as constant (exact for compact f and constants).
  const double R = std::isfinite(f.support_radius) ? reach(f, x) + 1.0 : rho + 10.0;
  auto g = [&](double r) { return (fx - spherical_average(f, x, r)) * std::exp(-(1.0 + 2.0 * s) * std::log(r)); };
  const double body =
      integrate_breaks(g, radial_breaks(f, rho, 0.0, R), cfg, quad::SingularityHint::inverse_sqrt_at_lower(),
                       "frac_pointwise");
  const double tail = (fx - spherical_average(f, x, R)) * std::pow(R, -2.0 * s) / (2.0 * s);
  const double pref = frac_constant(n, s).c_ns * constants(n).sphere_area;
  return pref * (body + tail);
}

namespace {

// (2/Gamma(n/2)) int_0^U e^{-u^2} u^{n-1} h(u) du with breaks from the profile.
double gaussian_radial(const TestFunction& f, const Point& x, double t, double U, const std::function<double(double)>& h,
                       const quad::QuadratureConfig& cfg) {
  const int n = f.dimension;
  const double st = 2.0 * std::sqrt(t);
  std::vector<double> pts{0.0, U};
  for (double b : radial_breaks(f, norm(x, n), 0.0, U * st)) {
    if (b > 0.0 && b < U * st) pts.push_back(b / st);
  }
  std::sort(pts.begin(), pts.end());
  auto g = [&](double u) { return std::exp(-u * u) * std::pow(u, n - 1) * h(u * st); };
  return 2.0 / specfun::gamma(0.5 * n) * integrate_breaks(g, pts, cfg, {}, "heat_point");
}

constexpr double kGaussCut = 8.0;  // e^{-64} is beyond double resolution of the sums

}  // namespace

double heat_point(const TestFunction& f, const Point& x, double t, const quad::QuadratureConfig& cfg) {
  if (!(t > 0.0)) throw DomainError("heat_point: t must be > 0");
  const double st = 2.0 * std::sqrt(t);
  const double U = std::min(kGaussCut, reach(f, x) / st);
  if (U <= 0.0) return 0.0;
  return gaussian_radial(f, x, t, U, [&](double r) { return spherical_average(f, x, r); }, cfg);
}

double heat_deficit_point(const TestFunction& f, const Point& x, double t, const quad::QuadratureConfig& cfg) {
  if (!(t > 0.0)) throw DomainError("heat_deficit_point: t must be > 0");
  const int n = f.dimension;
  const double fx = f.eval(x);
  const double st = 2.0 * std::sqrt(t);
  const double U = std::min(kGaussCut, reach(f, x) / st);
  double body = 0.0;
  if (U > 0.0) {
    body = gaussian_radial(f, x, t, U, [&](double r) { return fx - spherical_average(f, x, r); }, cfg);
  }
  // Past U the spherical mean vanishes, so the weight there carries f(x) alone.
  const double tail = fx == 0.0 ? 0.0 : fx * specfun::upper_gamma(0.5 * n, U * U) / specfun::gamma(0.5 * n);
  return body + tail;
}

namespace {

// Inner radial integrals are resolved well below the outer tolerance, with an
// absolute floor proportional to the size of the quantity being computed and
// never below the roundoff of f(x) - A(r).
quad::QuadratureConfig inner_cfg(const quad::QuadratureConfig& cfg, double scale, double fx) {
  quad::QuadratureConfig c = cfg;
  c.rel_tol = std::min(1e-12, cfg.rel_tol * 1e-2);
  c.abs_tol = std::max(1e-14 * scale, 1e-15 * std::abs(fx));
  if (c.abs_tol == 0.0) c.abs_tol = 1e-300;
  return c;
}

// Below this time the deficit f(x) - P_t f(x) is replaced by a cubic
// a t + b t^2 + c t^3 through three samples and integrated in closed form.
constexpr double kTimeFloor = 1e-4;

struct DeficitFit {
  double a, b, c;
  // int_0^floor fit(t) t^{-1-s} dt; s = 0 gives the log head int fit(t)/t dt.
  double head(double s) const {
    const double T = kTimeFloor;
    return a * std::pow(T, 1.0 - s) / (1.0 - s) + b * std::pow(T, 2.0 - s) / (2.0 - s) +
           c * std::pow(T, 3.0 - s) / (3.0 - s);
  }
};

DeficitFit fit_deficit(const TestFunction& f, const Point& x, const quad::QuadratureConfig& cfg, double fx) {
  const double t[3] = {0.25 * kTimeFloor, 0.5 * kTimeFloor, kTimeFloor};
  double g[3];
  for (int i = 0; i < 3; ++i) g[i] = heat_deficit_point(f, x, t[i], inner_cfg(cfg, t[i], fx)) / t[i];
  // Newton divided differences of g = a + b t + c t^2.
  const double d01 = (g[1] - g[0]) / (t[1] - t[0]);
  const double d12 = (g[2] - g[1]) / (t[2] - t[1]);
  const double c = (d12 - d01) / (t[2] - t[0]);
  const double b = d01 - c * (t[0] + t[1]);
  const double a = g[0] - b * t[0] - c * t[0] * t[0];
  return {a, b, c};
}

}  // namespace

double log_bochner_point(const TestFunction& f, const Point& x, const quad::QuadratureConfig& cfg) {
  require_dini(f, "log_bochner_point");
  if (!std::isfinite(f.support_radius)) throw DomainError("log_bochner_point: needs compact support");
  const int n = f.dimension;
  const double T = cfg.split_time;
  const double fx = f.eval(x);
  // int_0^T (e^{-t} - 1)/t dt = -(gamma + log T + E1(T)); int_T^inf e^{-t}/t dt = E1(T).
  const double scalar = -fx * (specfun::kEulerGamma + std::log(T));
  auto head = [&](double t) { return heat_deficit_point(f, x, t, inner_cfg(cfg, t, fx)) / t; };
  const DeficitFit fit = fit_deficit(f, x, cfg, fx);
  const double floor_val = fit.head(0.0);
  std::vector<double> pts;
  for (double e = kTimeFloor; e < T; e *= 10.0) pts.push_back(e);
  pts.push_back(T);
  const double head_val = floor_val + integrate_breaks(head, pts, cfg, {}, "log_bochner_point");
  auto tail = [&](double t) { return heat_point(f, x, t, inner_cfg(cfg, std::pow(t, -0.5 * n), 0.0)) / t; };
  const double tail_val = quad::integrate_power_tail(tail, T, 0.5 * n, cfg).checked("log_bochner_point");
  return scalar + head_val - tail_val;
}

double frac_bochner_point(const TestFunction& f, const Point& x, double s, const quad::QuadratureConfig& cfg) {
  check_s(s, "frac_bochner_point");
  require_dini(f, "frac_bochner_point");
  if (!std::isfinite(f.support_radius)) throw DomainError("frac_bochner_point: needs compact support");
  const int n = f.dimension;
  const double T = cfg.split_time;
  const double fx = f.eval(x);
  // t = T tau^p with p = 1/(1-s) flattens the t^{-s} behaviour at 0.
  const double p = 1.0 / (1.0 - s);
  auto head = [&](double tau) {
    const double t = T * std::pow(tau, p);
    return p * std::pow(T, -s) * heat_deficit_point(f, x, t, inner_cfg(cfg, t, fx)) * std::pow(tau, -p * s - 1.0);
  };
  const DeficitFit fit = fit_deficit(f, x, cfg, fx);
  const double floor_val = fit.head(s);
  std::vector<double> pts;
  for (double e = kTimeFloor; e < T; e *= 10.0) pts.push_back(std::pow(e / T, 1.0 / p));
  pts.push_back(1.0);
  const double head_val = floor_val + integrate_breaks(head, pts, cfg, {}, "frac_bochner_point");
  auto tail = [&](double t) {
    return heat_point(f, x, t, inner_cfg(cfg, std::pow(t, -0.5 * n), 0.0)) * std::pow(t, -1.0 - s);
  };
  const double tail_val = quad::integrate_power_tail(tail, T, 0.5 * n + s, cfg).checked("frac_bochner_point");
  return s / specfun::gamma(1.0 - s) * (head_val + fx * std::pow(T, -s) / s - tail_val);
}

LimitsReport limits_report(const TestFunction& f, const std::vector<double>& s_grid, double L, int N) {
  for (double s : s_grid) check_s(s, "limits_report");
  auto g = sample(f, L, N);
  double mean = 0.0;
  for (double v : g.samples) mean += v;
  mean /= static_cast<double>(g.samples.size());
  for (double& v : g.samples) v -= mean;

  const auto lap = neg_laplacian(g);
  const auto logf = log_multiplier(g);
  LimitsReport rep;
  rep.laplacian_norm = l2_norm(lap);
  rep.bridge_constant = 0.0;
  for (double s : s_grid) {
    LimitsRow row{s, 0.0, 0.0, 0.0};
    auto fs = frac_multiplier(g, s);
    auto d0 = fs;
    for (std::size_t i = 0; i < d0.samples.size(); ++i) d0.samples[i] -= g.samples[i];
    row.e0 = l2_norm(d0);
    auto f1 = frac_multiplier(g, 1.0 - s);
    for (std::size_t i = 0; i < f1.samples.size(); ++i) f1.samples[i] -= lap.samples[i];
    row.e1 = l2_norm(f1);
    for (std::size_t i = 0; i < d0.samples.size(); ++i) d0.samples[i] = d0.samples[i] / s - logf.samples[i];
    row.q = l2_norm(d0);
    rep.bridge_constant = std::max(rep.bridge_constant, row.q / s);
    rep.rows.push_back(row);
  }
  return rep;
}

void write_grid_csv(const PeriodicGridFunction& g, std::ostream& os) {
  static const char* names[3] = {"x", "y", "z"};
  for (int d = 0; d < g.n; ++d) os << names[d] << ',';
  os << "value\n";
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    const Point p = g.point(i);
    for (int d = 0; d < g.n; ++d) os << io::format_double(p[d]) << ',';
    os << io::format_double(g.samples[i]) << '\n';
  }
}

std::string grid_json_header(const PeriodicGridFunction& g) {
  std::ostringstream os;
  os << "{\"n\":" << g.n << ",\"L\":" << io::format_double(g.L) << ",\"N\":" << g.N << "}";
  return os.str();
}

}  // namespace loglap::euclid
