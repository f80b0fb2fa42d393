#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsm/parallel.hpp"

using namespace tsm;

TEST_CASE("every index runs exactly once") {
  for (Execution exec : {Execution::serial, Execution::parallel}) {
    std::vector<int> hits(1000, 0);
    for_each_index(hits.size(), exec, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("the lowest failing index wins") {
  setenv("TSM_THREADS", "4", 1);
  for (Execution exec : {Execution::serial, Execution::parallel}) {
    try {
      for_each_index(500, exec, [](std::size_t i) {
        if (i % 97 == 13) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "13");
    }
  }
  unsetenv("TSM_THREADS");
}

TEST_CASE("worker count honours TSM_THREADS") {
  setenv("TSM_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("TSM_THREADS", "0", 1);  // auto
  CHECK(worker_count() >= 1);
  setenv("TSM_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);
  unsetenv("TSM_THREADS");
}
