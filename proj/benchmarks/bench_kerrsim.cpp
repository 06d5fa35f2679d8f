#include <cmath>
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "kerrsim/fock_gaussian.hpp"
#include "kerrsim/hybrid_evolver.hpp"
#include "kerrsim/lindblad_oracle.hpp"
#include "kerrsim/metrics.hpp"
#include "kerrsim/steady_state.hpp"

using namespace kerrsim;

namespace {

// kappa = 1 units of the 100-photon readout scenario.
SimConfig readout() {
  SimConfig c;
  c.kappa = 1.0;
  c.nonlinearity = NonlinearityModel::kerr(-0.004);
  c.drive = DriveSchedule::constant(32.0 / 5.0);
  c.n_b = 3.2e-3;
  return c;
}

std::vector<double> grid(double t_final, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t_final * i / n;
  return t;
}

void BM_HybridEvolve(benchmark::State& state) {
  const SimConfig c = readout();
  const auto times = grid(15.0, 300);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(HybridState::vacuum(), c, times));
}
BENCHMARK(BM_HybridEvolve)->Unit(benchmark::kMicrosecond);

void BM_LindbladRhs(benchmark::State& state) {
  const long dim = state.range(0);
  const LindbladGenerator g = build_generator(readout(), dim);
  const Eigen::MatrixXcd rho = FockDensityMatrix::thermal(dim, 2.0).data();
  Eigen::MatrixXcd out;
  for (auto _ : state) {
    lindblad_rhs(g, rho, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(dim);
}
BENCHMARK(BM_LindbladRhs)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

void BM_GaussianInfidelity(benchmark::State& state) {
  const long dim = 230;
  const GaussianState g = from_dsts({0.2, 1.0, 0.05}, std::polar(10.0, -0.9));
  const FockDensityMatrix rho = dsts_density(g.center(), to_dsts(g), dim);
  const GaussianState h = from_dsts({0.21, 1.02, 0.05}, std::polar(10.01, -0.9));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_infidelity(rho, h));
}
BENCHMARK(BM_GaussianInfidelity)->Unit(benchmark::kMillisecond);

void BM_ConversionInfidelity(benchmark::State& state) {
  const double beta = static_cast<double>(state.range(0));
  const FockGaussianParams p = from_phase_space(GaussianState({beta, 0.0}, 0.53125, 0.46875, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(conversion_infidelity(p));
}
BENCHMARK(BM_ConversionInfidelity)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SteadyShape(benchmark::State& state) {
  const SimConfig c = readout();
  const complex beta = steady_centers(c).front().beta;
  for (auto _ : state) benchmark::DoNotOptimize(steady_shape(beta, c));
}
BENCHMARK(BM_SteadyShape);

}  // namespace

BENCHMARK_MAIN();
