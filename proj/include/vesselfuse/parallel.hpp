#pragma once

// Deterministic data-parallel helpers. Work is split by index and every
// result is written to its own slot, so outputs never depend on the number
// of workers. Reductions happen sequentially after the parallel phase.

#include <cstddef>
#include <memory>
#include <utility>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_invoke.h>

namespace vesselfuse {

/// Name of the environment variable capping worker threads (0/unset = all cores).
inline constexpr const char* kThreadsEnvVar = "VESSELFUSE_THREADS";

/// Reads the worker cap from the environment; 0 means no cap.
std::size_t worker_limit_from_env();

std::size_t hardware_workers();

/// Caps the number of worker threads for its lifetime. A limit of 0 leaves
/// the scheduler default in place.
class WorkerLimit {
 public:
  explicit WorkerLimit(std::size_t max_workers);
  ~WorkerLimit();
  WorkerLimit(const WorkerLimit&) = delete;
  WorkerLimit& operator=(const WorkerLimit&) = delete;

 private:
  std::unique_ptr<tbb::global_control> control_;
};

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
  });
}

template <class... Fns>
void parallel_invoke(Fns&&... fns) {
  tbb::parallel_invoke(std::forward<Fns>(fns)...);
}

}  // namespace vesselfuse
