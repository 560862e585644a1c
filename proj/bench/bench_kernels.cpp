#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "intentforge/kernels.hpp"

namespace k = intentforge::kernels;
using intentforge::Matrix;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = d(rng);
  return m;
}

// Shapes: batch n, output m, input k. Arg pairs cover the LSTM gate product
// (4·64 outputs over 103+64 inputs) and a large prediction chunk.
template <auto Fn>
void nt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const std::size_t kdim = 167;
  const Matrix x = random_matrix(n, kdim, 1);
  const Matrix w = random_matrix(m, kdim, 2);
  const std::vector<double> bias(m, 0.1);
  Matrix out(n, m);
  for (auto _ : state) {
    Fn(x, w, bias, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * m * kdim));
}

template <auto Fn>
void nn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const std::size_t kdim = 167;
  const Matrix g = random_matrix(n, m, 3);
  const Matrix w = random_matrix(m, kdim, 4);
  Matrix out(n, kdim);
  for (auto _ : state) {
    Fn(g, w, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * m * kdim));
}

template <auto Fn>
void tn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const std::size_t kdim = 167;
  const Matrix g = random_matrix(n, m, 5);
  const Matrix x = random_matrix(n, kdim, 6);
  Matrix acc(m, kdim);
  for (auto _ : state) {
    Fn(g, x, acc);
    benchmark::DoNotOptimize(acc.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * m * kdim));
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({32, 256})->Args({1024, 256})->Args({4096, 256});
}

}  // namespace

BENCHMARK(nt<k::serial::matmul_nt>)->Name("matmul_nt/serial")->Apply(shapes);
BENCHMARK(nt<k::parallel::matmul_nt>)->Name("matmul_nt/parallel")->Apply(shapes);
BENCHMARK(nn<k::serial::matmul_nn>)->Name("matmul_nn/serial")->Apply(shapes);
BENCHMARK(nn<k::parallel::matmul_nn>)->Name("matmul_nn/parallel")->Apply(shapes);
BENCHMARK(tn<k::serial::matmul_tn_acc>)->Name("matmul_tn_acc/serial")->Apply(shapes);
BENCHMARK(tn<k::parallel::matmul_tn_acc>)->Name("matmul_tn_acc/parallel")->Apply(shapes);

BENCHMARK_MAIN();
