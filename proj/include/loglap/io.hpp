#pragma once

#include <string>

namespace loglap::io {

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace loglap::io
