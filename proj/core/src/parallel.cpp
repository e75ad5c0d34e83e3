#include "heatcoeff/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace heatcoeff {

namespace {
std::atomic<int> g_default{0};

int env_threads() {
  const char* s = std::getenv("HEATCOEFF_THREADS");
  if (!s || !*s) return 0;
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == std::string(s).size() && v > 0) return v;
  } catch (...) {
  }
  return 0;
}
}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const int d = g_default.load(); d > 0) return d;
  if (const int e = env_threads(); e > 0) return e;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(int threads) { g_default.store(std::max(0, threads)); }

int default_threads() { return resolve_threads(0); }

void parallel_for(size_t n, const std::function<void(size_t)>& body, int threads) {
  if (n == 0) return;
  const size_t t = std::min<size_t>(static_cast<size_t>(resolve_threads(threads)), n);
  if (t <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::atomic<bool> failed{false};
  auto worker = [&](size_t lo, size_t hi) {
    try {
      for (size_t i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i) body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
      failed.store(true);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(t - 1);
  const size_t chunk = (n + t - 1) / t;
  for (size_t w = 1; w < t; ++w) {
    const size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo < hi) pool.emplace_back(worker, lo, hi);
  }
  worker(0, std::min(n, chunk));
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace heatcoeff
