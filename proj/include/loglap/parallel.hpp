#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace loglap::parallel {

// Worker count from LOGLAP_NUM_WORKERS, else the number of available cores.
int default_workers();

// out[i] = fn(i) for i < count, evaluated serially in index order.
std::vector<double> map_serial(std::size_t count, const std::function<double(std::size_t)>& fn);

// Same contract with OpenMP over indices (each index writes its own slot,
// so the result does not depend on the worker count). Falls back to the serial
// path when built without OpenMP or workers <= 1. The first exception thrown by
// any worker is rethrown after the loop.
std::vector<double> map(std::size_t count, const std::function<double(std::size_t)>& fn, int workers);

bool openmp_enabled();

}  // namespace loglap::parallel
