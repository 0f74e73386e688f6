#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "lowner/parallel.hpp"

using namespace lowner;

TEST(Parallel, MapPreservesOrder) {
  for (int threads : {1, 2, 4}) {
    const auto v = parallel_map<int>(50, threads, [](int i) { return i * i; });
    ASSERT_EQ(v.size(), 50u);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(v[i], i * i);
  }
}

TEST(Parallel, ForVisitsEachIndexOnce) {
  std::atomic<int> sum{0};
  parallel_for(100, 3, [&](int i) { sum += i; });
  EXPECT_EQ(sum.load(), 4950);
}

TEST(Parallel, RethrowsLowestFailingIndex) {
  try {
    parallel_for(20, 4, [](int i) {
      if (i == 7 || i == 13) throw std::runtime_error("index " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "index 7");
  }
}

TEST(Parallel, EmptyAndThreadCount) {
  EXPECT_TRUE(parallel_map<int>(0, 2, [](int i) { return i; }).empty());
  EXPECT_GE(hardware_threads(), 1);
}
