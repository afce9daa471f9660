#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "musical/parallel.hpp"

using namespace musical;

TEST_CASE("parallel_for visits every index once") {
    for (std::size_t count : {0u, 1u, 7u, 1000u}) {
        for (int threads : {0, 1, 3, 16}) {
            std::vector<std::atomic<int>> hits(count);
            parallel_for(count, threads, [&](std::size_t i) { hits[i].fetch_add(1); });
            for (const auto& h : hits) CHECK(h.load() == 1);
        }
    }
}

TEST_CASE("parallel_for rethrows the first failure") {
    std::atomic<int> ran{0};
    CHECK_THROWS_WITH_AS(parallel_for(100, 4,
                                      [&](std::size_t i) {
                                          ++ran;
                                          if (i == 42) throw std::runtime_error("boom");
                                      }),
                         "boom", std::runtime_error);
    CHECK(ran.load() >= 1);
}

TEST_CASE("thread count resolution") {
    CHECK(resolve_thread_count(0) >= 1);
    CHECK(resolve_thread_count(3) == 3);
}
