#include "quantband/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace quantband {

std::size_t worker_count(std::size_t tasks) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("QUANTBAND_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v > 0) n = std::min(n, static_cast<std::size_t>(v));
    } catch (...) {
      // Unparseable caps are ignored.
    }
  }
  return std::max<std::size_t>(1, std::min(n, tasks));
}

}  // namespace quantband
