#include "rectconv/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rectconv {

namespace {
std::atomic<int> g_threads{0};
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RECTCONV_THREADS"); env != nullptr && *env != '\0') {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("RECTCONV_THREADS must be a positive integer");
  }
  return omp_get_max_threads();
}

void set_thread_count(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  g_threads = threads;
}

int thread_count() {
  const int t = g_threads.load();
  return t > 0 ? t : resolve_thread_count(0);
}

std::vector<DensitySample> density_grid_serial(const Spectrum& spec, const ModelParams& params,
                                               std::span<const double> energies,
                                               const SolverConfig& cfg) {
  return map_indices_serial(energies.size(),
                            [&](std::size_t i) { return density_sample(spec, params, energies[i], cfg); });
}

std::vector<DensitySample> density_grid(const Spectrum& spec, const ModelParams& params,
                                        std::span<const double> energies, const SolverConfig& cfg) {
  return map_indices(energies.size(),
                     [&](std::size_t i) { return density_sample(spec, params, energies[i], cfg); });
}

std::vector<ConvolutionPoint> solve_grid_serial(const Spectrum& spec, const ModelParams& params,
                                                std::span<const ComplexPoint> zs,
                                                const SolverConfig& cfg) {
  return map_indices_serial(zs.size(), [&](std::size_t i) { return solve_point(spec, params, zs[i], cfg); });
}

std::vector<ConvolutionPoint> solve_grid(const Spectrum& spec, const ModelParams& params,
                                         std::span<const ComplexPoint> zs, const SolverConfig& cfg) {
  return map_indices(zs.size(), [&](std::size_t i) { return solve_point(spec, params, zs[i], cfg); });
}

}  // namespace rectconv
