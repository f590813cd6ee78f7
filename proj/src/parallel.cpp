#include "threshold_lab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace tlab {
namespace {
std::atomic<int> gThreads{1};
thread_local bool tlsSerial = false;
}

SerialScope::SerialScope() : previous_(tlsSerial) { tlsSerial = true; }
SerialScope::~SerialScope() { tlsSerial = previous_; }

void set_thread_count(int n) { gThreads = std::max(1, n); }

int thread_count() { return gThreads; }

int jobs_from_env(int fallback) {
  const char* env = std::getenv("THRESHOLD_LAB_JOBS");
  if (!env || !*env) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(env, &used);
    if (used != std::string(env).size() || v < 1) return fallback;
    return v;
  } catch (const std::exception&) {
    return fallback;
  }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = tlsSerial ? 1 : std::min<std::size_t>(static_cast<std::size_t>(gThreads.load()), n);
  if (workers <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo < hi) pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace tlab
