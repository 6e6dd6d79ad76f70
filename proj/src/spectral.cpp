#include "loglap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "json.hpp"
#include "loglap/errors.hpp"
#include "loglap/io.hpp"
#include "loglap/specfun.hpp"

namespace loglap::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

quad::QuadratureConfig tight(const quad::QuadratureConfig& cfg) {
  quad::QuadratureConfig c = cfg;
  c.abs_tol = std::min(c.abs_tol, 1e-15);
  c.rel_tol = std::min(c.rel_tol, 1e-11);
  c.max_subdivisions = std::max(c.max_subdivisions, 4000);
  return c;
}

void require_s(double s, const char* what) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError(std::string(what) + ": need 0 < s < 1");
}

std::vector<double> sorted_unique(std::vector<double> v, double lo, double hi) {
  for (double& p : v) p = std::clamp(p, lo, hi);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1 + std::abs(a)); }),
          v.end());
  return v;
}

EigenModel finish(EigenModel m) {
  std::stable_sort(m.eigenvalues.begin(), m.eigenvalues.end());
  return m;
}

}  // namespace

std::vector<std::pair<double, int>> EigenModel::multiplicities() const {
  std::vector<std::pair<double, int>> out;
  for (double l : eigenvalues) {
    if (!out.empty() && out.back().first == l)
      ++out.back().second;
    else
      out.emplace_back(l, 1);
  }
  return out;
}

EigenModel torus_model(int n, double L, int N) {
  if (n < 1 || n > 3) throw DomainError("torus_model: n must be 1, 2 or 3");
  if (!(L > 0.0) || N < 2 || N % 2 != 0) throw DomainError("torus_model: need L > 0 and even N >= 2");
  EigenModel m;
  m.kind = EigenModel::Kind::torus;
  m.id = "torus(" + std::to_string(n) + "," + io::format_double(L) + "," + std::to_string(N) + ")";
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
  const double w = 2.0 * kPi / L;
  m.eigenvalues.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double lam = 0.0;
    for (int d = 0; d < n; ++d) {
      const int k = static_cast<int>(rest % N) - N / 2;
      rest /= N;
      lam += (w * k) * (w * k);
    }
    m.eigenvalues.push_back(lam);
  }
  return finish(std::move(m));
}

EigenModel sphere2_model(int l_max) {
  if (l_max < 0) throw DomainError("sphere2_model: l_max must be >= 0");
  EigenModel m;
  m.kind = EigenModel::Kind::sphere2;
  m.id = "sphere2(" + std::to_string(l_max) + ")";
  for (int l = 0; l <= l_max; ++l) {
    for (int k = 0; k < 2 * l + 1; ++k) m.eigenvalues.push_back(static_cast<double>(l) * (l + 1));
  }
  return m;
}

EigenModel abstract_model(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw DomainError("abstract_model: empty eigenvalue list");
  for (double l : eigenvalues) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("abstract_model: eigenvalues must be finite and >= 0");
  }
  EigenModel m;
  m.kind = EigenModel::Kind::abstract;
  m.id = "abstract(" + std::to_string(eigenvalues.size()) + ")";
  m.eigenvalues = std::move(eigenvalues);
  return finish(std::move(m));
}

void PhiSpec::validate() const {
  switch (kind) {
    case Kind::frac:
    case Kind::shifted_frac_quotient:
      if (!(s > 0.0 && s < 1.0)) throw DomainError("PhiSpec: need 0 < s < 1");
      break;
    case Kind::heat:
      if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("PhiSpec: need t > 0");
      break;
    case Kind::custom:
      if (!custom) throw DomainError("PhiSpec: custom multiplier is empty");
      break;
    case Kind::log:
      break;
  }
}

double PhiSpec::operator()(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("PhiSpec: eigenvalue must be >= 0");
  switch (kind) {
    case Kind::frac:
      return std::pow(lambda, s);
    case Kind::log:
      if (lambda == 0.0) throw DomainError("PhiSpec: log of zero eigenvalue");
      return std::log(lambda);
    case Kind::heat:
      return std::exp(-t * lambda);
    case Kind::shifted_frac_quotient:
      return std::expm1(s * std::log(lambda)) / s;
    case Kind::custom:
      return custom(lambda);
  }
  return 0.0;
}

std::string PhiSpec::name() const {
  switch (kind) {
    case Kind::frac:
      return "frac(" + io::format_double(s) + ")";
    case Kind::log:
      return "log";
    case Kind::heat:
      return "heat(" + io::format_double(t) + ")";
    case Kind::shifted_frac_quotient:
      return "shifted_frac_quotient(" + io::format_double(s) + ")";
    case Kind::custom:
      return "custom";
  }
  return "";
}

PhiSpec compose(const PhiSpec& a, const PhiSpec& b) {
  a.validate();
  b.validate();
  const bool kills_zero = a.kind == PhiSpec::Kind::log || b.kind == PhiSpec::Kind::log;
  return PhiSpec::from([a, b, kills_zero](double lambda) {
    if (lambda == 0.0 && kills_zero) return 0.0;
    return a(lambda) * b(lambda);
  });
}

SpectralCoefficients apply_phi(const EigenModel& model, const std::vector<double>& coeffs, const PhiSpec& phi) {
  phi.validate();
  if (coeffs.size() != model.size()) throw DomainError("apply_phi: coefficient count does not match the model");
  SpectralCoefficients out;
  out.coeffs.resize(coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (!std::isfinite(coeffs[j])) throw DomainError("apply_phi: non-finite coefficient");
    const double lam = model.eigenvalues[j];
    if (lam == 0.0 && phi.kind == PhiSpec::Kind::log) {
      out.removed_zero_modes.push_back(coeffs[j]);
      out.coeffs[j] = 0.0;
      continue;
    }
    out.coeffs[j] = phi(lam) * coeffs[j];
  }
  return out;
}

double bochner_eigen_log(double lambda, const quad::QuadratureConfig& cfg) {
  return quad::frullani_log(lambda, cfg);
}

SobolevNorms sobolev_norms(const EigenModel& model, const std::vector<double>& coeffs, double s) {
  if (!(s >= 0.0)) throw DomainError("sobolev_norms: need s >= 0");
  if (coeffs.size() != model.size()) throw DomainError("sobolev_norms: coefficient count does not match the model");
  Accumulator hs, hl;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double lam = model.eigenvalues[j];
    const double c2 = coeffs[j] * coeffs[j];
    if (lam == 0.0) {
      hs.add(c2);
      hl.add(c2);
      continue;
    }
    const double lg = std::log(lam);
    hs.add((1.0 + std::pow(lam, 2.0 * s)) * c2);
    hl.add((1.0 + lg * lg) * c2);
  }
  return {std::sqrt(hs.value()), std::sqrt(hl.value())};
}

std::vector<EmbeddingRow> embedding_counterexample(double epsilon, const std::vector<long>& N_list) {
  if (!(epsilon > 0.0)) throw DomainError("embedding_counterexample: need epsilon > 0");
  if (N_list.empty()) throw DomainError("embedding_counterexample: empty N list");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 10 || N_list[i] > 10'000'000) throw DomainError("embedding_counterexample: N outside [10, 1e7]");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw DomainError("embedding_counterexample: N list must increase");
  }
  std::vector<EmbeddingRow> rows;
  Accumulator F, G, H;
  std::size_t next = 0;
  for (long k = 2; k <= N_list.back(); ++k) {
    const double kd = static_cast<double>(k);
    const double lk = std::log(kd);
    const double a2 = 1.0 / (kd * lk * lk);
    const double lambda = 1.0 / kd;
    const double ll = std::log(lambda);
    F.add(a2 * std::pow(lambda, 2.0 * epsilon));
    G.add(a2 * ll * ll);
    H.add(1.0 / kd);
    if (k == N_list[next]) {
      rows.push_back({k, F.value(), G.value(), H.value()});
      ++next;
    }
  }
  return rows;
}

void write_embedding_csv(const std::vector<EmbeddingRow>& rows, std::ostream& os) {
  os << "N,F,G,harmonic\n";
  for (const auto& r : rows) {
    os << r.N << ',' << io::format_double(r.F) << ',' << io::format_double(r.G) << ',' << io::format_double(r.harmonic)
       << '\n';
  }
}

double halfline_density(double t, double x, double y) {
  if (!(t > 0.0) || !(x > 0.0) || !(y > 0.0)) throw DomainError("halfline_density: need t, x, y > 0");
  const double d = x - y;
  // g(x-y) - g(x+y) = g(x-y) (1 - e^{-xy/t})
  return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * t) * -std::expm1(-x * y / t);
}

double halfline_mass(double t, double x) {
  if (!(t > 0.0) || !(x > 0.0)) throw DomainError("halfline_mass: need t, x > 0");
  return specfun::erf(x / (2.0 * std::sqrt(t)));
}

double halfline_loss(double t, double x) {
  if (!(t > 0.0) || !(x > 0.0)) throw DomainError("halfline_loss: need t, x > 0");
  return specfun::erfc(x / (2.0 * std::sqrt(t)));
}

double halfline_mass_quadrature(double t, double x, const quad::QuadratureConfig& cfg) {
  if (!(t > 0.0) || !(x > 0.0)) throw DomainError("halfline_mass_quadrature: need t, x > 0");
  const auto c = tight(cfg);
  const double sig = std::sqrt(2.0 * t);
  const double top = x + 12.0 * sig;
  const auto pts = sorted_unique({0.0, x - 12.0 * sig, x - 3.0 * sig, x, x + 3.0 * sig, top}, 0.0, top);
  auto p = [&](double y) { return y <= 0.0 ? 0.0 : halfline_density(t, x, y); };
  return quad::integrate_panels(p, pts, c).checked("halfline_mass_quadrature") +
         quad::integrate_semiinfinite(p, top, c).checked("halfline_mass_quadrature");
}

double massloss_vs(double x, double s, const quad::QuadratureConfig& cfg) {
  if (!(x > 0.0)) throw DomainError("massloss_vs: need x > 0");
  require_s(s, "massloss_vs");
  const auto c = tight(cfg);
  auto g = [&](double t) { return std::pow(t, -1.0 - s) * halfline_loss(t, x); };
  // erfc(x/2 sqrt t) < 1e-100 below t = x^2/2000
  const double t0 = x * x / 2000.0;
  const double T = x * x * 1e4;
  std::vector<double> pts;
  for (double t = t0; t < T; t *= 10.0) pts.push_back(t);
  pts.push_back(T);
  const double body = quad::integrate_panels(g, pts, c).checked("massloss_vs");
  const double tail = quad::integrate_power_tail(g, T, s, c).checked("massloss_vs");
  return s / specfun::gamma(1.0 - s) * (body + tail);
}

double massloss_vs_closed(double x, double s) {
  if (!(x > 0.0)) throw DomainError("massloss_vs_closed: need x > 0");
  require_s(s, "massloss_vs_closed");
  return std::pow(0.5 * x, -2.0 * s) * specfun::gamma(s + 0.5) / (std::sqrt(kPi) * specfun::gamma(1.0 - s));
}

MasslossSweep massloss_sweep(double x, const std::vector<double>& s_grid, const quad::QuadratureConfig& cfg) {
  if (s_grid.size() < 2) throw DomainError("massloss_sweep: need at least two s values");
  MasslossSweep out;
  out.x = x;
  out.s = s_grid;
  out.increasing_as_s_decreases = true;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (i > 0 && !(s_grid[i] < s_grid[i - 1])) throw DomainError("massloss_sweep: s grid must decrease");
    out.values.push_back(massloss_vs(x, s_grid[i], cfg));
    if (i > 0 && !(out.values[i] > out.values[i - 1])) out.increasing_as_s_decreases = false;
  }
  // Neville's scheme at s = 0.
  std::vector<double> P = out.values;
  const std::size_t m = P.size();
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i + k < m; ++i) {
      const double si = s_grid[i], sk = s_grid[i + k];
      P[i] = (sk * P[i] - si * P[i + 1]) / (sk - si);
    }
  }
  out.extrapolated = P[0];
  return out;
}

void write_massloss_csv(const MasslossSweep& sweep, std::ostream& os) {
  os << "s,V_s\n";
  for (std::size_t i = 0; i < sweep.s.size(); ++i)
    os << io::format_double(sweep.s[i]) << ',' << io::format_double(sweep.values[i]) << '\n';
}

std::string massloss_json(const MasslossSweep& sweep) {
  nlohmann::ordered_json j;
  j["x"] = sweep.x;
  j["s"] = sweep.s;
  j["values"] = sweep.values;
  j["increasing_as_s_decreases"] = sweep.increasing_as_s_decreases;
  j["extrapolated"] = sweep.extrapolated;
  return j.dump(2);
}

void HalfLineProfile::validate() const {
  if (!f) throw DomainError("HalfLineProfile: empty profile");
  if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) throw DomainError("HalfLineProfile: need 0 < a < b < inf");
}

HalfLineProfile halfline_bump(double a, double b) {
  HalfLineProfile p;
  p.id = "bump";
  p.a = a;
  p.b = b;
  p.f = [a, b](double y) {
    const double u = (2.0 * y - a - b) / (b - a);
    return std::abs(u) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - u * u));
  };
  p.validate();
  return p;
}

DiscrepancyReport frac_discrepancy_halfline(const HalfLineProfile& prof, double s, double x,
                                            const quad::QuadratureConfig& cfg) {
  prof.validate();
  require_s(s, "frac_discrepancy_halfline");
  if (!(x > 0.0)) throw DomainError("frac_discrepancy_halfline: need x > 0");
  const auto c = tight(cfg);
  const auto& f = prof.f;
  const double fx = f(x);
  const double a = prof.a, b = prof.b;

  auto y_points = [&](double t, double lo, double hi) {
    const double sig = std::sqrt(2.0 * t);
    std::vector<double> p{lo, hi, a, b};
    for (double k : {-12.0, -3.0, -1.0, 0.0, 1.0, 3.0, 12.0}) p.push_back(x + k * sig);
    return sorted_unique(p, lo, hi);
  };

  // f(x) - P_t f(x) = int_a^b (f(x) - f(y)) p dy + f(x) (1 - int_a^b p dy),
  // the second mass in closed form.
  auto spectral_integrand = [&](double t) {
    auto g = [&](double y) { return (fx - f(y)) * halfline_density(t, x, y); };
    const double near = quad::integrate_panels(g, y_points(t, a, b), c).checked("frac_discrepancy_halfline");
    const double rt = 2.0 * std::sqrt(t);
    const double outside = 0.5 * specfun::erfc((x - a) / rt) + 0.5 * specfun::erfc((b - x) / rt) +
                           0.5 * (specfun::erf((x + b) / rt) - specfun::erf((x + a) / rt));
    return near + fx * outside;
  };
  // int_0^inf (f(x) - f(y)) p dy by quadrature over the whole half-line.
  auto hk_integrand = [&](double t) {
    auto g = [&](double y) { return y <= 0.0 ? 0.0 : (fx - f(y)) * halfline_density(t, x, y); };
    const double top = std::max(b, x) + 12.0 * std::sqrt(2.0 * t);
    const double body = quad::integrate_panels(g, y_points(t, 0.0, top), c).checked("frac_discrepancy_halfline");
    const double tail = quad::integrate_semiinfinite(g, top, c).checked("frac_discrepancy_halfline");
    return body + tail;
  };

  // Below th both integrands are -t f''(x) to O(t^2).
  const double th = 1e-6;
  const double h = 1e-3;
  const double f2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * fx + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
  const double head = -f2 * std::pow(th, 1.0 - s) / (1.0 - s);

  std::vector<double> pts;
  for (double t = th; t < 1e4; t *= 10.0) pts.push_back(t);
  pts.push_back(1e4);
  auto outer = [&](const std::function<double(double)>& inner, double decay) {
    auto g = [&](double t) { return inner(t) * std::pow(t, -1.0 - s); };
    return head + quad::integrate_panels(g, pts, c).checked("frac_discrepancy_halfline") +
           quad::integrate_power_tail(g, 1e4, decay, c).checked("frac_discrepancy_halfline");
  };

  const double pref = s / specfun::gamma(1.0 - s);
  DiscrepancyReport r;
  r.fx = fx;
  r.A = pref * outer(spectral_integrand, s);
  // f(x) times the surviving mass decays like t^(-1/2)
  r.B = pref * outer(hk_integrand, s + 0.5);
  r.vs = massloss_vs(x, s, cfg);
  r.residual = std::abs(r.A - r.B - r.vs * fx);
  return r;
}

}  // namespace loglap::spectral
