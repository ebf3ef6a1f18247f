#include "sgspec/parallel.hpp"

#include <cstdlib>
#include <string>

namespace sgspec {

namespace {

std::atomic<std::size_t> configured{0};

}  // namespace

std::size_t worker_count() {
  if (const std::size_t n = configured.load(); n > 0) return n;
  if (const char* env = std::getenv("SGSPEC_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void set_worker_count(std::size_t n) { configured = n; }

}  // namespace sgspec
