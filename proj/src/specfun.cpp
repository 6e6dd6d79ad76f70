#include "loglap/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "loglap/errors.hpp"

namespace loglap::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite argument");
}

// Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k (k >= 1), A&S 6.1.34.
constexpr std::array<double, 26> kRecipGamma = {
    1.0000000000000000,  0.5772156649015329,  -0.6558780715202538, -0.0420026350340952,
    0.1665386113822915,  -0.0421977345555443, -0.0096219715278770, 0.0072189432466630,
    -0.0011651675918591, -0.0002152416741149, 0.0001280502823882,  -0.0000201348547807,
    -0.0000012504934821, 0.0000011330272320,  -0.0000002056338417, 0.0000000061160950,
    0.0000000050020075,  -0.0000000011812746, 0.0000000001043427,  0.0000000000077823,
    -0.0000000000036968, 0.0000000000005100,  -0.0000000000000206, -0.0000000000000054,
    0.0000000000000014,  0.0000000000000001};

struct TemmeGammas {
  double gam1;   // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;   // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;  // 1/G(1+mu)
  double gammi;  // 1/G(1-mu)
};

TemmeGammas temme_gammas(double mu) {
  // 1/G(1+mu) = sum_k c_k mu^(k-1); split by parity, Horner in mu^2.
  double even = 0.0;
  double odd = 0.0;
  const double mu2 = mu * mu;
  for (int k = 25; k >= 1; k -= 2) even = even * mu2 + kRecipGamma[k - 1];  // k odd: powers mu^(k-1)
  for (int k = 26; k >= 2; k -= 2) odd = odd * mu2 + kRecipGamma[k - 1];    // k even: powers mu^(k-2)
  TemmeGammas g{};
  g.gam2 = even;
  g.gam1 = -odd;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  return g;
}

// K_mu(x), K_{mu+1}(x) for |mu| <= 1/2.
void bessel_k_pair(double mu, double x, double& k_mu, double& k_mu1) {
  const double pi = std::numbers::pi;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    const double mu2 = mu * mu;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      c *= d / i;
      p /= i - mu;
      q /= i + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw std::runtime_error("bessel_k: series failed to converge");
    k_mu = sum;
    k_mu1 = sum1 * (2.0 / x);
    return;
  }
  // Steed's method for Temme's continued fraction CF2.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw std::runtime_error("bessel_k: continued fraction failed to converge");
  h = a1 * h;
  k_mu = std::sqrt(pi / (2.0 * x)) * std::exp(-x) / s;
  k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
}

}  // namespace

void Accuracy::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0)) throw DomainError("Accuracy: tolerances must be >= 0");
  if (abs_tol <= 0.0 && rel_tol <= 0.0) throw DomainError("Accuracy: one tolerance must be > 0");
}

bool Accuracy::accepts(double computed, double reference) const {
  return std::abs(computed - reference) <= std::max(abs_tol, rel_tol * std::abs(reference));
}

double gamma_ln(double a) {
  require_finite(a, "gamma_ln");
  if (a <= 0.0) throw DomainError("gamma_ln: a must be > 0");
  return std::lgamma(a);
}

double gamma(double a) {
  require_finite(a, "gamma");
  if (a <= 0.0) throw DomainError("gamma: a must be > 0");
  return std::tgamma(a);
}

double digamma(double a) {
  require_finite(a, "digamma");
  if (a <= 0.0) throw DomainError("digamma: a must be > 0");
  double shift = 0.0;
  while (a < 10.0) {
    shift -= 1.0 / a;
    a += 1.0;
  }
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  // Asymptotic series with Bernoulli numbers B_2k / (2k).
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
  return shift + std::log(a) - 0.5 * inv - tail;
}

namespace {

// gamma(a, x) by its power series; valid and fast for x < a + 1.
double lower_gamma_series(double a, double x) {
  if (x == 0.0) return 0.0;
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x));
    }
  }
  throw std::runtime_error("lower_gamma: series failed to converge");
}

// Gamma(a, x) by Lentz's continued fraction; x >= a + 1.
double upper_gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return std::exp(-x + a * std::log(x)) * h;
  }
  throw std::runtime_error("upper_gamma: continued fraction failed to converge");
}

void check_incomplete_args(double a, double x, const char* name) {
  require_finite(a, name);
  require_finite(x, name);
  if (a <= 0.0) throw DomainError(std::string(name) + ": a must be > 0");
  if (x < 0.0) throw DomainError(std::string(name) + ": x must be >= 0");
}

}  // namespace

double upper_gamma(double a, double x) {
  check_incomplete_args(a, x, "upper_gamma");
  if (x == 0.0) return std::tgamma(a);
  if (x < a + 1.0) return std::tgamma(a) - lower_gamma_series(a, x);
  return upper_gamma_cf(a, x);
}

double lower_gamma(double a, double x) {
  check_incomplete_args(a, x, "lower_gamma");
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return std::tgamma(a) - upper_gamma_cf(a, x);
}

double upper_gamma_negative(double a, double x) {
  require_finite(a, "upper_gamma_negative");
  require_finite(x, "upper_gamma_negative");
  if (!(a > -1.0 && a < 0.0)) throw DomainError("upper_gamma_negative: a must lie in (-1, 0)");
  if (x <= 0.0) throw DomainError("upper_gamma_negative: x must be > 0");
  return (upper_gamma(a + 1.0, x) - std::exp(a * std::log(x) - x)) / a;
}

double exp_integral_e1(double x) {
  require_finite(x, "exp_integral_e1");
  if (x <= 0.0) throw DomainError("exp_integral_e1: x must be > 0");
  if (x <= 1.0) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= -x / k;
      const double add = -term / k;
      sum += add;
      if (std::abs(add) < kEps * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h * std::exp(-x);
  }
  throw std::runtime_error("exp_integral_e1: continued fraction failed to converge");
}

double bessel_k_half_integer(int n, double x) {
  if (n < 0) throw DomainError("bessel_k_half_integer: n must be >= 0");
  require_finite(x, "bessel_k_half_integer");
  if (x <= 0.0) throw DomainError("bessel_k_half_integer: x must be > 0");
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < n; ++k) {
    term *= static_cast<double>(n + k + 1) * (n - k) / ((k + 1) * 2.0 * x);
    sum += term;
  }
  const double v = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
  if (!std::isfinite(v)) throw std::overflow_error("bessel_k: result overflows");
  return v;
}

double bessel_k(double nu, double x) {
  require_finite(nu, "bessel_k");
  require_finite(x, "bessel_k");
  if (nu < 0.0) throw DomainError("bessel_k: nu must be >= 0");
  if (x <= 0.0) throw DomainError("bessel_k: x must be > 0");

  const double twice = 2.0 * nu;
  if (twice == std::floor(twice) && static_cast<long>(twice) % 2 == 1 && nu < 60.0) {
    return bessel_k_half_integer(static_cast<int>(nu - 0.5), x);
  }

  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  double k_mu = 0.0;
  double k_mu1 = 0.0;
  bessel_k_pair(mu, x, k_mu, k_mu1);
  // Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m is stable for K.
  double km = k_mu;
  double kp = k_mu1;
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * (2.0 / x) * kp + km;
    km = kp;
    kp = next;
    if (!std::isfinite(kp) && i < nl) throw std::overflow_error("bessel_k: result overflows");
  }
  if (!std::isfinite(km)) throw std::overflow_error("bessel_k: result overflows");
  return km;
}

double erf(double x) {
  if (std::isnan(x)) throw DomainError("erf: NaN argument");
  return std::erf(x);
}

double erfc(double x) {
  if (std::isnan(x)) throw DomainError("erfc: NaN argument");
  return std::erfc(x);
}

}  // namespace loglap::specfun
