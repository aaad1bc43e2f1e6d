#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "rectconv/edge.hpp"
#include "rectconv/error.hpp"
#include "rectconv/kernels.hpp"

using namespace rectconv;

TEST(Kernels, DensityGridSerialEqualsParallel) {
  auto s = canonical_sqrt_spectrum(100, 1.0);
  auto pr = make_params(100, 200, 0.2);
  std::vector<double> es;
  for (int i = 1; i <= 40; ++i) es.push_back(0.05 * i);
  const int saved = thread_count();
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    auto a = density_grid_serial(s, pr, es);
    auto b = density_grid(s, pr, es);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].rho, b[i].rho);
      EXPECT_EQ(a[i].E, b[i].E);
    }
  }
  set_thread_count(saved);
}

TEST(Kernels, SolveGridSerialEqualsParallel) {
  auto s = canonical_sqrt_spectrum(60, 1.0);
  auto pr = make_params(60, 100, 0.3);
  std::vector<ComplexPoint> zs;
  for (int i = 0; i < 25; ++i) zs.push_back({0.1 * i, 1e-3 * (1 + i)});
  set_thread_count(3);
  auto a = solve_grid_serial(s, pr, zs);
  auto b = solve_grid(s, pr, zs);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    EXPECT_EQ(a[i].m, b[i].m);
    EXPECT_EQ(a[i].zeta, b[i].zeta);
  }
  set_thread_count(1);
}

TEST(Kernels, MapIndicesOrderAndExceptions) {
  set_thread_count(4);
  auto sq = map_indices(100, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(sq[i], i * i);
  EXPECT_EQ(map_indices_serial(5, [](std::size_t i) { return 2 * i; }), (std::vector<std::size_t>{0, 2, 4, 6, 8}));
  EXPECT_THROW(map_indices(50,
                           [](std::size_t i) -> int {
                             if (i == 17) throw NumericalError("boom");
                             return 0;
                           }),
               NumericalError);
  set_thread_count(1);
}

TEST(Kernels, ThreadCountResolution) {
  EXPECT_EQ(resolve_thread_count(3), 3);
  ::setenv("RECTCONV_THREADS", "5", 1);
  EXPECT_EQ(resolve_thread_count(0), 5);
  EXPECT_EQ(resolve_thread_count(2), 2);
  ::setenv("RECTCONV_THREADS", "zero", 1);
  EXPECT_THROW(resolve_thread_count(0), std::invalid_argument);
  ::unsetenv("RECTCONV_THREADS");
  EXPECT_GE(resolve_thread_count(0), 1);
  EXPECT_THROW(set_thread_count(0), std::invalid_argument);
}
