// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "sae/kernels.hpp"
#include "sae/matrix.hpp"
#include "sae/rng.hpp"

namespace {

using namespace sae;

struct Operands {
  Matrix a, b, c;
};

// Shapes of the hot products: a batch times encoder weights (nt), the
// weight gradient (tn), and the backpropagated delta (nn).
Operands make(std::size_t m, std::size_t n, std::size_t k, char kind) {
  Rng rng(42);
  Operands o;
  switch (kind) {
    case 'n':
      o.a = glorot_init(m, k, rng);
      o.b = glorot_init(k, n, rng);
      break;
    case 't':
      o.a = glorot_init(m, k, rng);
      o.b = glorot_init(n, k, rng);
      break;
    default:
      o.a = glorot_init(k, m, rng);
      o.b = glorot_init(k, n, rng);
      break;
  }
  o.c = Matrix(m, n);
  return o;
}

template <auto Kernel, char Kind>
void BM_gemm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  Operands o = make(m, n, k, Kind);
  for (auto _ : state) {
    Kernel(m, n, k, o.a.data(), o.b.data(), o.c.data());
    benchmark::DoNotOptimize(o.c.data().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * n * k));
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({160, 64, 256})->Args({160, 256, 64})->Args({1, 2000, 8100})->Args({256, 256, 256});
}

BENCHMARK(BM_gemm<kernels::serial::gemm_nt, 't'>)->Name("gemm_nt/serial")->Apply(shapes);
BENCHMARK(BM_gemm<kernels::parallel::gemm_nt, 't'>)->Name("gemm_nt/parallel")->Apply(shapes);
BENCHMARK(BM_gemm<kernels::serial::gemm_nn, 'n'>)->Name("gemm_nn/serial")->Apply(shapes);
BENCHMARK(BM_gemm<kernels::parallel::gemm_nn, 'n'>)->Name("gemm_nn/parallel")->Apply(shapes);
BENCHMARK(BM_gemm<kernels::serial::gemm_tn, 'x'>)->Name("gemm_tn/serial")->Apply(shapes);
BENCHMARK(BM_gemm<kernels::parallel::gemm_tn, 'x'>)->Name("gemm_tn/parallel")->Apply(shapes);

}  // namespace

BENCHMARK_MAIN();
