#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "loglap/euclid.hpp"
#include "loglap/quad.hpp"

namespace loglap::hyperbolic {

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long p, long long q = 1);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational operator*(const Rational& o) const;
  Rational operator+(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

// coeff * t^(t_pow2/2) * e^(-m2_coeff t/4) * r^r_pow * coth^coth_pow(r) * csch^csch_pow(r)
//   * [e^(-r^2/4t)] * [c^scale_pow * r^-(nu+j) K_(nu+j)(c r)]
// The Bessel factor is present when bessel_order_shift = j is set; nu and c live on the TermSum.
struct RadialTerm {
  Rational coeff{1};
  int t_pow2 = 0;
  int m2_coeff = 0;
  int r_pow = 0;
  int coth_pow = 0;
  int csch_pow = 0;
  bool gauss = false;
  std::optional<int> bessel_order_shift;
  int scale_pow = 0;

  bool same_shape(const RadialTerm& o) const;
};

struct TermSum {
  std::vector<RadialTerm> terms;
  std::optional<double> bessel_base_order;
  std::optional<double> bessel_scale;

  // D = (1/sinh r) d/dr, exact. Like terms are merged, zero terms dropped.
  TermSum derivative() const;
  double eval(double r, double t) const;
  // Same sum with every e^(-r^2/4t) factor replaced by 1.
  double eval_without_gauss(double r, double t) const;
};

// e^(-m^2 t - r^2/4t) as a one-term sum.
TermSum heat_seed(int m);
// r^-nu K_nu(c r).
TermSum bessel_seed(double nu, double c);

// Heat kernel p_n(r, t) on H^n, n in {2,3,4,5}; r = 0 by continuous extension.
double heat_kernel(int n, double r, double t, const quad::QuadratureConfig& cfg = {});
// p_n(r, t) e^(r^2/4t): finite where p_n itself underflows.
double heat_kernel_scaled(int n, double r, double t, const quad::QuadratureConfig& cfg = {});

double dm_envelope(int n, double r, double t);
double dm_envelope_scaled(int n, double r, double t);  // times e^(r^2/4t)

struct RatioScan {
  double ratio_min;
  double ratio_max;
  // Spread ratio_max/ratio_min: after dividing by ratio_min every ratio lies in [1/C, C].
  double constant() const { return ratio_max / ratio_min; }
};

RatioScan dm_ratio_scan(int n, const std::vector<double>& r_grid, const std::vector<double>& t_grid,
                        const quad::QuadratureConfig& cfg = {});

enum class KernelRoute { time_quadrature, bessel_closed_form, term_algebra };
const char* route_name(KernelRoute r);

// int_0^inf p_n(r,t) t^(-1-s) dt.
double frac_kernel(int n, double s, double r, KernelRoute route = KernelRoute::time_quadrature,
                   const quad::QuadratureConfig& cfg = {});

struct LogKernels {
  double k1;  // int_0^1 p/t dt
  double k2;  // int_1^inf p/t dt
};

LogKernels log_kernels(int n, double r, const quad::QuadratureConfig& cfg = {});
double log_kernel_1(int n, double r, const quad::QuadratureConfig& cfg = {});
double log_kernel_2(int n, double r, const quad::QuadratureConfig& cfg = {});

// Same t-integration applied to the Euclidean Gaussian kernel (4 pi t)^(-n/2) e^(-r^2/4t).
double euclid_log_kernel_1(int n, double r, const quad::QuadratureConfig& cfg = {});

enum class KernelKind { heat, frac, log1, log2 };
const char* kind_name(KernelKind k);

struct KernelTable {
  KernelKind kind = KernelKind::heat;
  int n = 3;
  std::optional<double> s;
  std::optional<double> t;
  std::vector<double> r_grid;
  std::vector<double> values;
  KernelRoute route = KernelRoute::time_quadrature;
  quad::QuadratureConfig cfg;

  bool positive() const;
  bool strictly_decreasing() const;
};

// workers <= 1 runs the serial reference path; results are identical either way.
KernelTable build_kernel_table(KernelKind kind, int n, std::optional<double> s, std::optional<double> t,
                               const std::vector<double>& r_grid, KernelRoute route,
                               const quad::QuadratureConfig& cfg, int workers);

void write_table_csv(const KernelTable& table, std::ostream& os);
std::string table_json_sidecar(const KernelTable& table);

enum class FitRegime { small_r, large_r };
enum class FitModel { power, power_exp, gaussian_tail };

struct FitReport {
  FitRegime regime;
  FitModel model;
  // intercept, then log r, r, r^2 as far as the model goes
  std::vector<double> coefficients;
  double residual;  // RMS of the log-value residuals
  int points;

  double log_coefficient() const { return coefficients.at(1); }
  double linear_coefficient() const { return coefficients.at(2); }
  double quadratic_coefficient() const { return coefficients.at(3); }
  std::string json() const;
};

// Least squares of log(value) on the model basis over the regime window
// (small: r <= 0.3, large: r >= 3). Needs >= 6 points in the window.
FitReport asympt_fit(const KernelTable& table, FitRegime regime, FitModel model);

// Radial function of the distance to a fixed center.
struct HyperRadialFunction {
  std::string id;
  std::function<double(double)> profile;
  double support_radius = 1.0;
  euclid::Smoothness smoothness;
  std::vector<double> radial_breaks;

  void validate() const;
};

HyperRadialFunction hyper_bump(double radius = 1.0);
HyperRadialFunction hyper_zero();

// Mean of f over the geodesic sphere of radius r about a point at distance a from the center.
double sphere_mean(int n, const HyperRadialFunction& f, double a, double r, const quad::QuadratureConfig& cfg = {});

// int K1 (f(x) - f(y)) - int K2 f(y) + Gamma'(1) f(x), x at distance x_dist from the center.
double log_pointwise_h(int n, const HyperRadialFunction& f, double x_dist, const quad::QuadratureConfig& cfg = {});

// int_0^inf (e^-t f(x) - (e^{t Delta} f)(x)) / t dt with the heat semigroup by radial quadrature.
double log_bochner_h(int n, const HyperRadialFunction& f, double x_dist, const quad::QuadratureConfig& cfg = {});

struct RhoH {
  double value;  // |S^(n-1)| int_1^inf K1 sinh^(n-1) dr + Gamma'(1)
  double error;
};

RhoH rho_h(int n, const quad::QuadratureConfig& cfg = {});

struct SplitReport {
  double near;       // int_{B1} K1 (f(x) - f(y))
  double far;        // -int_{outside B1} K2 f
  double remainder;  // R_n(f; x)
  double rho;
  double full;       // log_pointwise_h
  double residual;   // |near + far + remainder - full|
};

SplitReport split_check(int n, const HyperRadialFunction& f, double x_dist, const quad::QuadratureConfig& cfg = {});

// Remainder R_n(f; x) alone.
double remainder_h(int n, const HyperRadialFunction& f, double x_dist, double rho,
                   const quad::QuadratureConfig& cfg = {});

struct EnergyReport {
  double p;
  double q;
  double lhs;            // int |R_n(f)| |f|
  double k2_near_norm;   // ||chi_1 K2||_q
  double k1_far_norm;    // ||K1 1_{r>=1}||_q
  double f_p_norm;
  double f_2_norm;
  double rho;
  double rhs_signed;     // with rho as written
  double rhs_abs;        // with |rho|
  bool holds_signed() const { return lhs <= rhs_signed; }
  bool holds_abs() const { return lhs <= rhs_abs; }
};

// 1/q + 2/p = 2, p in [1, 2].
EnergyReport energy_inequality(int n, const HyperRadialFunction& f, double p, const quad::QuadratureConfig& cfg = {});

// int |f| e^(-(n-1) d)/(1 + d) dvol, d the distance to the center of f.
double weighted_l1_norm(int n, const HyperRadialFunction& f, const quad::QuadratureConfig& cfg = {});

struct KernelNormsReport {
  int n;
  double p;
  std::vector<double> radii;
  std::vector<double> norms;           // ||K2||_{L^p(B_R)}
  std::vector<double> log_growth;      // (norm_{i+1} - norm_i)/log(R_{i+1}/R_i)
  double last_relative_change;
  std::optional<double> weighted_l1;
  std::optional<EnergyReport> energy;
};

KernelNormsReport kernel_norms(int n, double p, const std::vector<double>& radii,
                               const HyperRadialFunction* f = nullptr, const quad::QuadratureConfig& cfg = {});

struct ChapmanKolmogorov {
  double lhs;
  double rhs;
};

// int_{H^3} p(d(x,y), t) p(d(y,z), s) dvol(y) against p(d(x,z), t+s).
ChapmanKolmogorov chapman_kolmogorov(int n, double t, double s, double d, const quad::QuadratureConfig& cfg = {});

// |S^(n-1)| int_0^inf p_n(r, t) sinh^(n-1) r dr.
double heat_mass(int n, double t, const quad::QuadratureConfig& cfg = {});

}  // namespace loglap::hyperbolic
