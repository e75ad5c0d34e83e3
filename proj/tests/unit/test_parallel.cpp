#include "heatcoeff/parallel.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

using namespace heatcoeff;

TEST_CASE("thread count resolution") {
  ::unsetenv("HEATCOEFF_THREADS");
  CHECK(resolve_threads(3) == 3);
  const int hw = resolve_threads(0);
  CHECK(hw >= 1);
  ::setenv("HEATCOEFF_THREADS", "2", 1);
  CHECK(resolve_threads(0) == 2);
  CHECK(resolve_threads(5) == 5);
  ::setenv("HEATCOEFF_THREADS", "zero", 1);
  CHECK(resolve_threads(0) == hw);
  ::setenv("HEATCOEFF_THREADS", "-4", 1);
  CHECK(resolve_threads(0) == hw);
  ::unsetenv("HEATCOEFF_THREADS");
}

TEST_CASE("parallel_for visits every index once") {
  for (int threads : {1, 2, 4}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; }, threads);
    for (int h : hits) CHECK(h == 1);
  }
  std::atomic<int> count{0};
  parallel_for(0, [&](size_t) { ++count; }, 4);
  CHECK(count == 0);
}

TEST_CASE("worker exceptions reach the caller") {
  CHECK_THROWS_AS(parallel_for(100, [](size_t i) {
    if (i == 57) throw std::runtime_error("boom");
  }, 3), std::runtime_error);
}

TEST_CASE("default thread count") {
  const int before = default_threads();
  set_default_threads(2);
  CHECK(default_threads() == 2);
  set_default_threads(before);
}
