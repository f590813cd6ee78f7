#pragma once

#include <cstddef>
#include <functional>

namespace tlab {

/// Worker count used by data-parallel loops (default 1). Results never
/// depend on it: every loop writes disjoint outputs and reductions run
/// serially.
void set_thread_count(int n);
int thread_count();

/// Reads THRESHOLD_LAB_JOBS; returns fallback when unset or malformed.
int jobs_from_env(int fallback = 1);

/// While alive, parallel_for on this thread runs serially (used by workers
/// that are themselves one of several concurrent jobs).
class SerialScope {
 public:
  SerialScope();
  ~SerialScope();
  SerialScope(const SerialScope&) = delete;
  SerialScope& operator=(const SerialScope&) = delete;

 private:
  bool previous_;
};

/// Calls body(begin, end) on contiguous chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace tlab
