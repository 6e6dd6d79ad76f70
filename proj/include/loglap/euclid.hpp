#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "loglap/quad.hpp"

namespace loglap::euclid {

using Point = std::array<double, 3>;  // unused trailing coordinates are ignored

struct EuclideanConstants {
  int n;
  double c_n;          // pi^(-n/2) Gamma(n/2) = 2/|S^(n-1)|
  double rho_n;        // 2 log 2 + psi(n/2) - gamma
  double sphere_area;  // |S^(n-1)|
};

EuclideanConstants constants(int n);

struct FracConstant {
  int n;
  double s;
  double c_ns;  // s 4^s Gamma(n/2+s) / (pi^(n/2) Gamma(1-s))
};

FracConstant frac_constant(int n, double s);

// Same prefactor obtained from the heat semigroup:
// (s/Gamma(1-s)) int_0^inf (4 pi t)^(-n/2) e^(-1/4t) t^(-1-s) dt.
double frac_constant_bochner(int n, double s, const quad::QuadratureConfig& cfg = {});

struct Smoothness {
  enum class Kind { smooth, holder };
  Kind kind = Kind::smooth;
  double beta = 1.0;  // Holder exponent; beta <= 0 means discontinuous

  static Smoothness smooth() { return {Kind::smooth, 1.0}; }
  static Smoothness holder(double b) { return {Kind::holder, b}; }
  bool dini() const { return kind == Kind::smooth || beta > 0.0; }
};

// Radial test function f(x) = profile(|x|) on R^n.
struct TestFunction {
  std::string id;
  int dimension = 1;
  std::function<double(double)> profile;
  double support_radius = 0.0;  // infinity allowed
  Smoothness smoothness;
  std::vector<double> radial_breaks;  // radii where the profile is not smooth
  // Exact radial Fourier transform, int f(x) e^{-i xi.x} dx as a function of |xi|.
  std::optional<std::function<double(double)>> fourier;

  double eval(const Point& x) const;
};

// Registry ids: gaussian, bump, plateau, constant, indicator.
std::vector<std::string> registry_ids();
TestFunction make_test_function(const std::string& id, int n);

// Samples of a function on [-L/2, L/2)^n with N points per axis,
// x_j = -L/2 + j h, row-major with the last axis fastest.
struct PeriodicGridFunction {
  int n = 1;
  double L = 1.0;
  int N = 2;
  std::vector<double> samples;

  double h() const { return L / N; }
  double coord(int j) const { return -0.5 * L + j * h(); }
  std::size_t size() const;
  Point point(std::size_t flat) const;
  void validate() const;
};

PeriodicGridFunction sample(const TestFunction& f, double L, int N);
PeriodicGridFunction sample(const std::function<double(const Point&)>& f, int n, double L, int N);

// Multiply every Fourier mode by symbol(|xi_k|^2).
PeriodicGridFunction apply_symbol(const PeriodicGridFunction& g, const std::function<double(double)>& symbol);
PeriodicGridFunction heat_apply(const PeriodicGridFunction& g, double t);
// Mean mode is set to zero: the operator acts on the mean-zero complement.
PeriodicGridFunction log_multiplier(const PeriodicGridFunction& g);
PeriodicGridFunction frac_multiplier(const PeriodicGridFunction& g, double s);
// -Delta, symbol |xi|^2.
PeriodicGridFunction neg_laplacian(const PeriodicGridFunction& g);

double l2_norm(const PeriodicGridFunction& g);
double max_norm(const PeriodicGridFunction& g);

// Trigonometric interpolant of the grid samples at arbitrary points.
std::vector<double> interpolate(const PeriodicGridFunction& g, const std::vector<Point>& pts);

// Lattice kernels relating the torus multipliers to their R^n counterparts:
// (torus operator f)(x) - (R^n operator f)(x) = int f(y) kappa(x - y) dy.
double torus_log_kernel(int n, double L, const Point& z);
double torus_frac_kernel(int n, double L, double s, const Point& z);

// R^n values of log(-Delta) f and (-Delta)^s f from the torus multiplier,
// with the lattice correction subtracted. Needs L >= 2 support_radius.
std::vector<double> log_multiplier_rn(const TestFunction& f, const std::vector<Point>& pts, double L, int N);
std::vector<double> frac_multiplier_rn(const TestFunction& f, const std::vector<Point>& pts, double s, double L,
                                       int N);

// Spherical mean of f over the sphere of radius r about x.
double spherical_average(const TestFunction& f, const Point& x, double r);

double log_pointwise(const TestFunction& f, const Point& x, const quad::QuadratureConfig& cfg = {});
double frac_pointwise(const TestFunction& f, const Point& x, double s, const quad::QuadratureConfig& cfg = {});

// (e^{t Delta} f)(x) and f(x) - (e^{t Delta} f)(x), each by radial quadrature.
double heat_point(const TestFunction& f, const Point& x, double t, const quad::QuadratureConfig& cfg = {});
double heat_deficit_point(const TestFunction& f, const Point& x, double t, const quad::QuadratureConfig& cfg = {});

double log_bochner_point(const TestFunction& f, const Point& x, const quad::QuadratureConfig& cfg = {});
double frac_bochner_point(const TestFunction& f, const Point& x, double s, const quad::QuadratureConfig& cfg = {});

struct LimitsRow {
  double s;
  double e0;  // ||(-Delta)^s f - f||
  double e1;  // ||(-Delta)^(1-s) f + Delta f||
  double q;   // ||((-Delta)^s f - f)/s - log(-Delta) f||
};

struct LimitsReport {
  std::vector<LimitsRow> rows;
  double laplacian_norm;  // ||Delta f||
  double bridge_constant;  // max q(s)/s
};

// Sampled on an n-dimensional torus, mean removed.
LimitsReport limits_report(const TestFunction& f, const std::vector<double>& s_grid, double L, int N);

// CSV: one row per grid point, coordinates then value. JSON header {n, L, N}.
void write_grid_csv(const PeriodicGridFunction& g, std::ostream& os);
std::string grid_json_header(const PeriodicGridFunction& g);

}  // namespace loglap::euclid
