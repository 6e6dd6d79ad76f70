// Serial reference against the OpenMP path for table tabulation and point-set
// evaluation. Prints wall times, speedup and whether the outputs agree bit for bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "loglap/euclid.hpp"
#include "loglap/hyperbolic.hpp"
#include "loglap/parallel.hpp"

using namespace loglap;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  double best = INFINITY;
  for (int k = 0; k < reps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

bool report(const char* name, std::size_t items, double ts, double tp, bool same, int workers) {
  std::printf("%-34s %5zu items  serial %8.3f s  parallel(%d) %8.3f s  speedup %5.2f  %s\n", name, items, ts, workers,
              tp, ts / tp, same ? "identical" : "MISMATCH");
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  const int workers = std::max(2, parallel::default_workers());
  std::printf("openmp %s, workers %d, best of %d\n", parallel::openmp_enabled() ? "on" : "off", workers, reps);
  bool ok = true;

  std::vector<double> grid;
  for (int i = 0; i < 48; ++i) grid.push_back(0.05 * std::pow(200.0, i / 47.0));
  for (auto kind : {hyperbolic::KernelKind::frac, hyperbolic::KernelKind::log2}) {
    std::optional<double> s;
    if (kind == hyperbolic::KernelKind::frac) s = 0.5;
    hyperbolic::KernelTable a, b;
    const double ts = seconds([&] {
      a = hyperbolic::build_kernel_table(kind, 2, s, {}, grid, hyperbolic::KernelRoute::time_quadrature, {}, 1);
    }, reps);
    const double tp = seconds([&] {
      b = hyperbolic::build_kernel_table(kind, 2, s, {}, grid, hyperbolic::KernelRoute::time_quadrature, {}, workers);
    }, reps);
    const std::string name = std::string("table ") + hyperbolic::kind_name(kind) + " n=2";
    ok &= report(name.c_str(), grid.size(), ts, tp, a.values == b.values, workers);
  }

  const auto bump = euclid::make_test_function("bump", 2);
  std::vector<euclid::Point> pts;
  for (int i = 0; i < 32; ++i) pts.push_back({0.03 * i * std::cos(0.7 * i), 0.03 * i * std::sin(0.7 * i), 0.0});
  auto ev = [&](std::size_t i) { return euclid::log_pointwise(bump, pts[i]); };
  std::vector<double> a, b;
  double ts = seconds([&] { a = parallel::map_serial(pts.size(), ev); }, reps);
  double tp = seconds([&] { b = parallel::map(pts.size(), ev, workers); }, reps);
  ok &= report("points log_pointwise R^2 bump", pts.size(), ts, tp, a == b, workers);

  const auto hb = hyperbolic::hyper_bump();
  std::vector<double> dist;
  for (int i = 0; i < 12; ++i) dist.push_back(0.25 * i);
  auto eh = [&](std::size_t i) { return hyperbolic::log_pointwise_h(3, hb, dist[i]); };
  ts = seconds([&] { a = parallel::map_serial(dist.size(), eh); }, reps);
  tp = seconds([&] { b = parallel::map(dist.size(), eh, workers); }, reps);
  ok &= report("points log_pointwise H^3 bump", dist.size(), ts, tp, a == b, workers);

  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
