#pragma once

// Special functions used by the kernel and identity code. All functions are
// pure and re-entrant.

namespace loglap::specfun {

/// Euler-Mascheroni constant. Cross-checked in the test suite against an
/// accelerated harmonic-sum computation.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct Accuracy {
  double abs_tol = 0.0;
  double rel_tol = 0.0;

  /// Throws DomainError unless at least one tolerance is strictly positive.
  void validate() const;
  bool accepts(double computed, double reference) const;
};

/// log Gamma(a) for a > 0.
double gamma_ln(double a);

/// Gamma(a) for a > 0.
double gamma(double a);

/// psi(a) = Gamma'(a)/Gamma(a) for a > 0.
double digamma(double a);

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^(a-1) e^-t dt, a > 0, x >= 0.
double upper_gamma(double a, double x);

/// Lower incomplete gamma gamma(a, x) = int_0^x t^(a-1) e^-t dt, a > 0, x >= 0.
double lower_gamma(double a, double x);

/// Gamma(a, x) for a in (-1, 0), x > 0, via Gamma(a+1, x) = a Gamma(a, x) + x^a e^-x.
double upper_gamma_negative(double a, double x);

/// E1(x) = int_x^inf e^-u / u du for x > 0.
double exp_integral_e1(double x);

/// Modified Bessel function of the second kind K_nu(x), nu >= 0, x > 0.
/// Throws std::overflow_error when the result is not representable.
double bessel_k(double nu, double x);

/// K_{n+1/2}(x) by the finite closed-form sum.
double bessel_k_half_integer(int n, double x);

double erf(double x);
double erfc(double x);

}  // namespace loglap::specfun
