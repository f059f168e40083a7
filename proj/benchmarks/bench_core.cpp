#include <benchmark/benchmark.h>

#include <random>

#include "qhall/lattice_model.hpp"
#include "qhall/neass.hpp"
#include "qhall/response.hpp"
#include "qhall/spectral.hpp"
#include "qhall/superop.hpp"

using namespace qhall;

namespace {

// Shared inputs, built once; every benchmark body starts from a ready model.
struct Fixture {
  LatticeGeometry g = lattice::build_geometry(12, 12, {1, 3});
  OperatorMatrix H = lattice::build_hamiltonian(g);
  DisplacementTable d = lattice::displacement_table(g);
  Spectrum s = spectral::eigendecompose(H);
  GapInfo gap = spectral::find_gap(s, -1.3);
  Projection P = spectral::fermi_projection_spectral(s, gap.mu);
  Matrix W = lattice::displacement_product(d, P.matrix.mat, 2);
};

const Fixture& fix() {
  static Fixture f;
  return f;
}

void BM_BuildHamiltonian(benchmark::State& state) {
  const auto& f = fix();
  for (auto _ : state) benchmark::DoNotOptimize(lattice::build_hamiltonian(f.g));
}
BENCHMARK(BM_BuildHamiltonian);

void BM_DisplacementTable(benchmark::State& state) {
  const auto& f = fix();
  for (auto _ : state) benchmark::DoNotOptimize(lattice::displacement_table(f.g));
}
BENCHMARK(BM_DisplacementTable);

void BM_Eigendecompose(benchmark::State& state) {
  const auto& f = fix();
  for (auto _ : state) benchmark::DoNotOptimize(spectral::eigendecompose(f.H));
}
BENCHMARK(BM_Eigendecompose);

void BM_FermiProjectionRiesz(benchmark::State& state) {
  const auto& f = fix();
  const Contour c = spectral::build_contour(f.gap, f.s, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::fermi_projection_riesz(f.H, c));
}
BENCHMARK(BM_FermiProjectionRiesz)->Arg(32)->Arg(64)->Arg(128);

void BM_NeassGenerators(benchmark::State& state) {
  const auto& f = fix();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(neass::neass_generators(f.H, f.P, f.s, f.d, order));
}
BENCHMARK(BM_NeassGenerators)->Arg(1)->Arg(2)->Arg(3);

void BM_NeassState(benchmark::State& state) {
  const auto& f = fix();
  static const NeassGenerators gen = neass::neass_generators(f.H, f.P, f.s, f.d, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(neass::neass_state(gen, f.P, f.H, f.d, 0.05));
}
BENCHMARK(BM_NeassState);

void BM_HallMarker(benchmark::State& state) {
  const auto& f = fix();
  for (auto _ : state)
    benchmark::DoNotOptimize(response::hall_conductivity_marker(f.P, f.d, f.g));
}
BENCHMARK(BM_HallMarker);

void BM_InvLiouvillianSpectral(benchmark::State& state) {
  const auto& f = fix();
  for (auto _ : state)
    benchmark::DoNotOptimize(superop::inv_liouvillian_spectral(f.s, f.P, f.W));
}
BENCHMARK(BM_InvLiouvillianSpectral);

void BM_InvLiouvillianContour(benchmark::State& state) {
  const auto& f = fix();
  const Contour c = spectral::build_contour(f.gap, f.s, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(superop::inv_liouvillian_contour(f.H, f.P, f.W, c));
}
BENCHMARK(BM_InvLiouvillianContour)->Arg(64)->Arg(128);

void BM_ChernNumberMomentum(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(response::chern_number_momentum({1, 3}, 1));
}
BENCHMARK(BM_ChernNumberMomentum);

}  // namespace

BENCHMARK_MAIN();
