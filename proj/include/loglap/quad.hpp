#pragma once

#include <functional>
#include <vector>

namespace loglap::quad {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  // Short/long time split used by every t-integral.
  double split_time = 1.0;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;

  // Throws NonConvergence (carrying value and error) when !converged.
  double checked(const char* what) const;
};

enum class Endpoint { none, lower, upper };
enum class SingularityKind { none, inverse_sqrt, log };

struct SingularityHint {
  Endpoint endpoint = Endpoint::none;
  SingularityKind kind = SingularityKind::none;

  static SingularityHint inverse_sqrt_at_lower() { return {Endpoint::lower, SingularityKind::inverse_sqrt}; }
  static SingularityHint inverse_sqrt_at_upper() { return {Endpoint::upper, SingularityKind::inverse_sqrt}; }
  static SingularityHint log_at_lower() { return {Endpoint::lower, SingularityKind::log}; }
  static SingularityHint log_at_upper() { return {Endpoint::upper, SingularityKind::log}; }

  void validate() const;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod 21 on [a, b]. Budget exhaustion is reported through
// converged=false; NaN or inf at a node throws NonFiniteIntegrand.
QuadResult integrate(const Integrand& f, double a, double b, SingularityHint hint = {},
                     const QuadratureConfig& cfg = {});

// int_a^inf f via t = a - 1 + 1/u.
QuadResult integrate_semiinfinite(const Integrand& f, double a, const QuadratureConfig& cfg = {});

// int_a^inf f for f ~ t^-(1+decay), a > 0, via t = a w^(-1/decay): the mapped
// integrand tends to a constant, where the plain map leaves u^(decay-1).
QuadResult integrate_power_tail(const Integrand& f, double a, double decay,
                                const QuadratureConfig& cfg = {});

// Sum of integrate() over consecutive panels [p0,p1], [p1,p2], ...
QuadResult integrate_panels(const Integrand& f, const std::vector<double>& points,
                            const QuadratureConfig& cfg = {});

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

// int_0^inf (e^-t - e^-lambda t)/t dt, split at cfg.split_time.
double frullani_log(double lambda, const QuadratureConfig& cfg = {});

struct GammaTailPoint {
  int n;
  double s;
  double r;
  double lower;
  double value;
  double upper;
  bool holds;
};

struct ScalarIdentityReport {
  // |I1 + I2 + gamma|
  double euler_residual = 0.0;
  struct Fhzdk {
    int n;
    double iterated;     // the double integral, inner and outer by quadrature
    double single;       // the one-dimensional log(4t) form
    double closed_form;  // Gamma'(n/2)/2 + Gamma(n/2) log 2
    double residual;     // |iterated - closed_form|
  };
  std::vector<Fhzdk> fhzdk;
  std::vector<GammaTailPoint> gamma_tail;
  bool gamma_tail_all_hold = true;
};

// Euler constant identity, the double-integral identity for each n, and the
// incomplete Gamma tail bounds over n in n_list (n >= 2), s in {0, 0.5}.
ScalarIdentityReport verify_scalar_identities(const std::vector<int>& n_list,
                                              const QuadratureConfig& cfg = {},
                                              int tail_points = 20, double tail_r_max = 12.0);

}  // namespace loglap::quad
