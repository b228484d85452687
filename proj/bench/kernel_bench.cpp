// Serial reference kernels against the OpenMP ones.
//
//   ./tvrls_kernel_bench --benchmark_filter=gram
//   OMP_NUM_THREADS=4 ./tvrls_kernel_bench

#include <benchmark/benchmark.h>

#include <random>

#include "tvrls/kernels.hpp"

namespace {

using tvrls::Matrix;
namespace k = tvrls::kernels;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(g);
  }
  return m;
}

Matrix spd(std::size_t n) {
  Matrix b = random_matrix(n, n, 7);
  Matrix a = k::reference::multiply_abt(b, b);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
  return a;
}

template <bool Parallel>
void bm_multiply_abt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : st) {
    benchmark::DoNotOptimize(Parallel ? k::multiply_abt(a, b) : k::reference::multiply_abt(a, b));
  }
}

template <bool Parallel>
void bm_low_rank(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  Matrix p = spd(n);
  const Matrix u = random_matrix(n, 3, 3);
  const Matrix w = k::multiply(u, spd(3));
  for (auto _ : st) {
    if constexpr (Parallel) {
      k::sym_low_rank_update(p, u, w, 1e-9);
    } else {
      k::reference::sym_low_rank_update(p, u, w, 1e-9);
    }
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void bm_gram(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  Matrix a(n, n);
  const Matrix phi = random_matrix(2, n, 4);
  const Matrix gamma = Matrix::identity(2);
  for (auto _ : st) {
    if constexpr (Parallel) {
      k::add_weighted_gram(a, phi, gamma);
    } else {
      k::reference::add_weighted_gram(a, phi, gamma);
    }
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void bm_cholesky(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = spd(n);
  for (auto _ : st) {
    Matrix l = a;
    benchmark::DoNotOptimize(Parallel ? k::cholesky_lower(l, 0.0)
                                      : k::reference::cholesky_lower(l, 0.0));
  }
}

#define TVRLS_PAIR(fn)                                                           \
  BENCHMARK(fn<false>)->Name(#fn "/reference")->RangeMultiplier(2)->Range(64, 512); \
  BENCHMARK(fn<true>)->Name(#fn "/openmp")->RangeMultiplier(2)->Range(64, 512)

TVRLS_PAIR(bm_multiply_abt);
TVRLS_PAIR(bm_low_rank);
TVRLS_PAIR(bm_gram);
TVRLS_PAIR(bm_cholesky);

}  // namespace

BENCHMARK_MAIN();
