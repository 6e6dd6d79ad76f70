#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "loglap/quad.hpp"

namespace loglap::spectral {

// Finite eigenbasis. One entry per basis function, so eigenvalues repeat
// according to multiplicity; the list is nondecreasing.
struct EigenModel {
  enum class Kind { torus, sphere2, abstract };
  Kind kind = Kind::abstract;
  std::string id;
  std::vector<double> eigenvalues;

  std::size_t size() const { return eigenvalues.size(); }
  // (eigenvalue, multiplicity) pairs in increasing order.
  std::vector<std::pair<double, int>> multiplicities() const;
};

// Modes k in {-N/2, ..., N/2 - 1}^n, lambda = |2 pi k / L|^2.
EigenModel torus_model(int n, double L, int N);
// lambda_l = l(l+1) with multiplicity 2l + 1, l = 0..l_max.
EigenModel sphere2_model(int l_max);
EigenModel abstract_model(std::vector<double> eigenvalues);

struct SpectralCoefficients {
  std::vector<double> coeffs;
  // Coefficients on lambda = 0 removed by the log multiplier, in model order.
  std::vector<double> removed_zero_modes;
};

struct PhiSpec {
  enum class Kind { frac, log, heat, shifted_frac_quotient, custom };
  Kind kind = Kind::log;
  double s = 0.5;
  double t = 1.0;
  std::function<double(double)> custom;

  static PhiSpec frac(double s) { return {Kind::frac, s, 1.0, {}}; }
  static PhiSpec log() { return {Kind::log, 0.5, 1.0, {}}; }
  static PhiSpec heat(double t) { return {Kind::heat, 0.5, t, {}}; }
  // (lambda^s - 1)/s
  static PhiSpec shifted_frac_quotient(double s) { return {Kind::shifted_frac_quotient, s, 1.0, {}}; }
  static PhiSpec from(std::function<double(double)> f) { return {Kind::custom, 0.5, 1.0, std::move(f)}; }

  void validate() const;
  double operator()(double lambda) const;
  std::string name() const;
};

// Pointwise product phi1 * phi2 as a custom multiplier.
PhiSpec compose(const PhiSpec& a, const PhiSpec& b);

SpectralCoefficients apply_phi(const EigenModel& model, const std::vector<double>& coeffs, const PhiSpec& phi);

// int_0^inf (e^-t - e^-lambda t)/t dt by quadrature.
double bochner_eigen_log(double lambda, const quad::QuadratureConfig& cfg = {});

struct SobolevNorms {
  double h_s;    // sqrt(sum (1 + lambda^2s) c^2), zero modes count c^2 once
  double h_log;  // sqrt(sum (1 + log^2 lambda) c^2), same convention
};

SobolevNorms sobolev_norms(const EigenModel& model, const std::vector<double>& coeffs, double s);

// a_k = 1/(sqrt(k) log k) on lambda_k = 1/k:
// F(N) = sum_{k=2}^N a_k^2 lambda_k^(2 eps), G(N) = sum_{k=2}^N a_k^2 log^2 lambda_k.
struct EmbeddingRow {
  long N;
  double F;
  double G;
  double harmonic;  // sum_{k=2}^N 1/k, accumulated independently
};

std::vector<EmbeddingRow> embedding_counterexample(double epsilon, const std::vector<long>& N_list);
void write_embedding_csv(const std::vector<EmbeddingRow>& rows, std::ostream& os);

// Brownian motion on (0, inf) killed at 0.
double halfline_density(double t, double x, double y);
// int_0^inf p_t(x, y) dy = erf(x / 2 sqrt t)
double halfline_mass(double t, double x);
double halfline_mass_quadrature(double t, double x, const quad::QuadratureConfig& cfg = {});
// 1 - mass, computed as erfc
double halfline_loss(double t, double x);

// (s/Gamma(1-s)) int_0^inf t^(-1-s) r(t, x) dt
double massloss_vs(double x, double s, const quad::QuadratureConfig& cfg = {});
// (x/2)^(-2s) Gamma(s + 1/2) / (sqrt(pi) Gamma(1 - s))
double massloss_vs_closed(double x, double s);

struct MasslossSweep {
  double x;
  std::vector<double> s;
  std::vector<double> values;
  bool increasing_as_s_decreases;
  double extrapolated;  // polynomial extrapolation in s to s = 0
};

MasslossSweep massloss_sweep(double x, const std::vector<double>& s_grid, const quad::QuadratureConfig& cfg = {});
void write_massloss_csv(const MasslossSweep& sweep, std::ostream& os);
std::string massloss_json(const MasslossSweep& sweep);

struct HalfLineProfile {
  std::string id;
  std::function<double(double)> f;
  double a;  // support in [a, b] inside (0, inf)
  double b;

  void validate() const;
};

// Smooth bump on [a, b].
HalfLineProfile halfline_bump(double a = 1.0, double b = 2.0);

struct DiscrepancyReport {
  double A;         // spectral: int (f(x) - P_t f(x)) t^(-1-s) dt, times s/Gamma(1-s)
  double B;         // heat kernel: int int (f(x) - f(y)) p_t(x,y) dy t^(-1-s) dt, same factor
  double vs;        // V_s(x)
  double fx;
  double residual;  // |A - B - V_s f(x)|
};

DiscrepancyReport frac_discrepancy_halfline(const HalfLineProfile& f, double s, double x,
                                            const quad::QuadratureConfig& cfg = {});

}  // namespace loglap::spectral
