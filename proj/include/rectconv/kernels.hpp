#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include <omp.h>

#include "rectconv/freeconv.hpp"

namespace rectconv {

/// Worker count used by the parallel kernels: `requested` if positive, else
/// RECTCONV_THREADS, else the OpenMP default.
int resolve_thread_count(int requested = 0);
void set_thread_count(int threads);
int thread_count();

// Grid kernels. Each point is solved independently, so the parallel and
// serial versions return bit-identical results for any thread count.

std::vector<DensitySample> density_grid_serial(const Spectrum& spec, const ModelParams& params,
                                               std::span<const double> energies,
                                               const SolverConfig& cfg = {});
std::vector<DensitySample> density_grid(const Spectrum& spec, const ModelParams& params,
                                        std::span<const double> energies,
                                        const SolverConfig& cfg = {});

std::vector<ConvolutionPoint> solve_grid_serial(const Spectrum& spec, const ModelParams& params,
                                                std::span<const ComplexPoint> zs,
                                                const SolverConfig& cfg = {});
std::vector<ConvolutionPoint> solve_grid(const Spectrum& spec, const ModelParams& params,
                                         std::span<const ComplexPoint> zs,
                                         const SolverConfig& cfg = {});

/// out[i] = fn(i) for i < count, serially.
template <typename Fn>
auto map_indices_serial(std::size_t count, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
  return out;
}

/// out[i] = fn(i) for i < count, one OpenMP task per index. The first
/// exception thrown by any worker is rethrown after the loop.
template <typename Fn>
auto map_indices(std::size_t count, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rectconv
