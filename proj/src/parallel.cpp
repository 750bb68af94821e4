#include "vesselfuse/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include <tbb/global_control.h>

namespace vesselfuse {

std::size_t worker_limit_from_env() {
  const char* raw = std::getenv(kThreadsEnvVar);
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const long long v = std::stoll(raw);
    return v > 0 ? static_cast<std::size_t>(v) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

std::size_t hardware_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

WorkerLimit::WorkerLimit(std::size_t max_workers) {
  if (max_workers > 0) {
    control_ = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, max_workers);
  }
}

WorkerLimit::~WorkerLimit() = default;

}  // namespace vesselfuse
