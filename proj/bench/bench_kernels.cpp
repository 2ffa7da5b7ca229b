// Parallel kernels against the serial reference versions.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "injnorm/kernels.hpp"
#include "injnorm/linalg.hpp"
#include "injnorm/reference_kernels.hpp"

using namespace injnorm;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

struct Problem {
  Shape shape;
  std::vector<cplx> psi;
  std::vector<std::vector<cplx>> w;
  std::vector<std::span<const cplx>> views;

  Problem(std::size_t n, std::size_t d) : shape(n, d), psi(random_vec(shape_size(shape), 1)) {
    for (std::size_t k = 0; k < n; ++k) w.push_back(random_vec(d, 2 + k));
    for (auto& v : w) views.emplace_back(v);
  }
};

template <bool Parallel>
void BM_contract_except(benchmark::State& state) {
  Problem p(3, static_cast<std::size_t>(state.range(0)));
  std::vector<cplx> out(p.shape[0]);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::contract_except(p.psi, p.shape, p.views, 1, out);
    else
      reference::contract_except(p.psi, p.shape, p.views, 1, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.psi.size()));
}

template <bool Parallel>
void BM_contract_all(benchmark::State& state) {
  Problem p(3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    cplx s = Parallel ? kernels::contract_all(p.psi, p.shape, p.views)
                      : reference::contract_all(p.psi, p.shape, p.views);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.psi.size()));
}

template <bool Parallel>
void BM_symmetrize(benchmark::State& state) {
  Problem p(3, static_cast<std::size_t>(state.range(0)));
  const auto perms = all_permutations(3);
  std::vector<cplx> out(p.psi.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::permutation_average(p.psi, p.shape, perms, out);
    else
      reference::permutation_average(p.psi, p.shape, perms, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_mps(benchmark::State& state) {
  const auto q = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 6, n = 3;
  const Shape phys(n, d), bond(n, q);
  std::vector<std::vector<cplx>> locals;
  std::vector<std::span<const cplx>> views;
  for (std::size_t k = 0; k < n; ++k) locals.push_back(random_vec(q * d * q, 10 + k));
  for (auto& l : locals) views.emplace_back(l);
  std::vector<cplx> out(shape_size(phys));
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::mps_contract(views, phys, bond, out);
    else
      reference::mps_contract(views, phys, bond, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_contract_except<true>)->Name("contract_except/parallel")->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_contract_except<false>)->Name("contract_except/serial")->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_contract_all<true>)->Name("contract_all/parallel")->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_contract_all<false>)->Name("contract_all/serial")->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_symmetrize<true>)->Name("symmetrize/parallel")->Arg(16)->Arg(32);
BENCHMARK(BM_symmetrize<false>)->Name("symmetrize/serial")->Arg(16)->Arg(32);
BENCHMARK(BM_mps<true>)->Name("mps_contract/parallel")->Arg(4)->Arg(16);
BENCHMARK(BM_mps<false>)->Name("mps_contract/serial")->Arg(4)->Arg(16);

BENCHMARK_MAIN();
