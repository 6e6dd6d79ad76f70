#include "loglap/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#ifdef LOGLAP_HAVE_OPENMP
#include <omp.h>
#endif

namespace loglap::parallel {

int default_workers() {
  if (const char* env = std::getenv("LOGLAP_NUM_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

bool openmp_enabled() {
#ifdef LOGLAP_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

std::vector<double> map_serial(std::size_t count, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
  return out;
}

std::vector<double> map(std::size_t count, const std::function<double(std::size_t)>& fn, int workers) {
#ifdef LOGLAP_HAVE_OPENMP
  if (workers <= 1 || count < 2) return map_serial(count, fn);
  std::vector<double> out(count);
  std::exception_ptr first;
  std::mutex guard;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
#else
  (void)workers;
  return map_serial(count, fn);
#endif
}

}  // namespace loglap::parallel
