#include "asp/adiabatic.hpp"
#include "asp/pairing.hpp"
#include "asp/twobody.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace asp;

namespace {

void BM_SectorMatrix(benchmark::State& st) {
  const auto H = build_hubbard_chain(static_cast<int>(st.range(0)), 1.0, 4.0, 0.0, true,
                                     static_cast<int>(st.range(0)) / 2, static_cast<int>(st.range(0)) / 2);
  for (auto _ : st) benchmark::DoNotOptimize(H.sector_matrix());
}
BENCHMARK(BM_SectorMatrix)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& st) {
  const auto H = build_four_site(1.0, 0.1, -2.0, 1e-6);
  const auto hf = hartree_fock(H, HfAnsatz::lowest_orbitals);
  const auto r = split_residual(H, hf.mean_field, ConstantPolicy::drop).residual;
  for (auto _ : st) {
    const auto modes = eigendecompose(build_two_particle_matrix(r));
    benchmark::DoNotOptimize(residual_terms(modes, H.sector()));
  }
}
BENCHMARK(BM_Decompose)->Unit(benchmark::kMillisecond);

void BM_ExactNorm(benchmark::State& st) {
  const int L = static_cast<int>(st.range(0)), N = L / 2;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(pair_count(L));
  for (auto& x : v) x = nd(rng);
  v.normalize();
  for (auto _ : st) benchmark::DoNotOptimize(exact_norm(v, L, N));
}
BENCHMARK(BM_ExactNorm)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_GapTrace(benchmark::State& st) {
  const auto H = build_trimer_split(1.0, 0.37, -5.0);
  const auto hf = hartree_fock(H, HfAnsatz::trimer_best);
  const auto Hi = hf.mean_field.sector_matrix();
  const AdiabaticPath path(Hi, {H.sector_matrix() - Hi}, PathSchedule::direct(1));
  const auto grid = uniform_grid(401);
  for (auto _ : st) benchmark::DoNotOptimize(gap_trace(path, grid));
}
BENCHMARK(BM_GapTrace)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& st) {
  const auto H = build_trimer_split(1.0, 0.37, -5.0);
  const auto hf = hartree_fock(H, HfAnsatz::trimer_best);
  const auto Hi = hf.mean_field.sector_matrix();
  const AdiabaticPath path(Hi, {H.sector_matrix() - Hi}, PathSchedule::direct(1));
  for (auto _ : st) benchmark::DoNotOptimize(propagate(path, 80.0, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Propagate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
