#include <benchmark/benchmark.h>

#include "heis/fock.hpp"
#include "heis/group.hpp"
#include "heis/hpdo.hpp"
#include "heis/lp.hpp"
#include "heis/spectral.hpp"
#include "heis/weyl.hpp"

using namespace heis;

static void BM_GroupMul(benchmark::State& st) {
  HPoint a(0.3, -0.7, 0.4), b(-0.5, 0.2, 0.9);
  for (auto _ : st) benchmark::DoNotOptimize(group_mul(a, b));
}
BENCHMARK(BM_GroupMul);

static void BM_RepMatrix(benchmark::State& st) {
  TruncatedBasis b(1, static_cast<int>(st.range(0)), 1.0);
  HPoint w(0.3, -0.7, 0.4);
  for (auto _ : st) benchmark::DoNotOptimize(rep_matrix(w, b));
}
BENCHMARK(BM_RepMatrix)->Arg(16)->Arg(32)->Arg(64);

static void BM_GFT(benchmark::State& st) {
  GridSpec g;
  g.nx = g.ny = g.ns = static_cast<int>(st.range(0));
  auto f = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-x * x - y * y - s * s)); });
  auto L = LambdaGrid::geometric(32, 1e-3, 8.0);
  for (auto _ : st) benchmark::DoNotOptimize(gft(f, L, 16));
}
BENCHMARK(BM_GFT)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_InverseGFT(benchmark::State& st) {
  GridSpec g;
  g.nx = g.ny = g.ns = 32;
  auto f = GridFunction::sample3(g, [](double x, double y, double s) { return cplx(std::exp(-x * x - y * y - s * s)); });
  auto F = gft(f, LambdaGrid::geometric(32, 1e-3, 8.0), 16);
  for (auto _ : st) benchmark::DoNotOptimize(inverse_gft(F, g));
}
BENCHMARK(BM_InverseGFT)->Unit(benchmark::kMillisecond);

static void BM_WeylMatrixGH(benchmark::State& st) {
  int N = static_cast<int>(st.range(0));
  weyl_matrix([](double x, double y) { return cplx(std::exp(-x * x - y * y)); }, N);  // warm the Wigner table
  for (auto _ : st) benchmark::DoNotOptimize(weyl_matrix([](double x, double y) { return cplx(std::exp(-x * x - y * y)); }, N));
}
BENCHMARK(BM_WeylMatrixGH)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_MoyalPoly(benchmark::State& st) {
  Poly x = Poly::xi(1, 0), y = Poly::eta(1, 0);
  Poly a = x * x * y + cplx(2) * y * y * y, b = x * y * y + x * x * x * x;
  for (auto _ : st) benchmark::DoNotOptimize(moyal_poly(a, b));
}
BENCHMARK(BM_MoyalPoly);

static void BM_LpProject(benchmark::State& st) {
  SpectralFunction F(LambdaGrid::geometric(64, 1e-3, 64.0), 1, 32);
  for (auto& M : F.mats) M.setOnes();
  for (auto _ : st) benchmark::DoNotOptimize(lp_project(F, 2));
}
BENCHMARK(BM_LpProject)->Unit(benchmark::kMicrosecond);

static void BM_OpApplySpectral(benchmark::State& st) {
  SpectralFunction F(LambdaGrid::geometric(64, 1e-3, 8.0), 1, 32);
  for (auto& M : F.mats) M.setOnes();
  auto a = builtin_symbol("besselPower", 1.0);
  op_apply_spectral(a, F);  // fill the matrix cache
  for (auto _ : st) benchmark::DoNotOptimize(op_apply_spectral(a, F));
}
BENCHMARK(BM_OpApplySpectral)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
