#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kerrsim/errors.hpp"
#include "kerrsim/hybrid_evolver.hpp"

using namespace kerrsim;

namespace {

std::vector<double> grid(double t_final, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t_final * i / n;
  return t;
}

SimConfig kerr_config(double eta, complex eps, double detuning = 0.0, double n_b = 0.0) {
  SimConfig c;
  c.kappa = 1.0;
  c.detuning = detuning;
  c.nonlinearity = NonlinearityModel::kerr(eta);
  c.drive = DriveSchedule::constant(eps);
  c.n_b = n_b;
  return c;
}

}  // namespace

TEST(HybridEvolver, LinearLimitIsCoherentEvolution) {
  const complex eps{2.0, 0.5};
  const double delta = 0.7;
  const SimConfig c = kerr_config(0.0, eps, delta);
  const auto times = grid(8.0, 40);
  const auto traj = evolve(HybridState::vacuum(), c, times, {1e-12, 1e-14});
  const complex lam{0.5, delta};
  const complex beta_ss = complex{0.0, -1.0} * eps / lam;
  for (const auto& s : traj.samples) {
    const complex exact = beta_ss * (1.0 - std::exp(-lam * s.t));
    EXPECT_NEAR(std::abs(s.state.beta - exact), 0.0, 1e-9);
    EXPECT_NEAR(s.state.w1, 1.0, 1e-9);
    EXPECT_NEAR(s.state.w2, 1.0, 1e-9);
    EXPECT_NEAR(s.state.k, 0.0, 1e-9);
  }
}

TEST(HybridEvolver, LinearThermalRelaxation) {
  const SimConfig c = kerr_config(0.0, {1.0, 0.0}, 0.0, 0.4);
  const auto times = grid(6.0, 12);
  const auto traj = evolve(HybridState::vacuum(), c, times, {1e-12, 1e-14});
  for (const auto& s : traj.samples) {
    const double cb = c.c_b();
    EXPECT_NEAR(s.state.w1, cb + (1.0 - cb) * std::exp(-s.t), 1e-9);
    EXPECT_NEAR(s.state.k, 0.0, 1e-12);
    EXPECT_NEAR(s.gaussian.b(), 0.0, 1e-9);
  }
}

TEST(HybridEvolver, PhaseFormAgrees) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double eta = -(0.002 + 0.05 * u(rng));
    const complex eps = std::polar(0.3 + 0.4 * u(rng), 6.28 * u(rng)) / std::sqrt(-eta);
    const SimConfig c = kerr_config(eta, eps, 2.0 * u(rng) - 1.0, 0.3 * u(rng));
    const auto times = grid(6.0, 30);
    // Start slightly away from vacuum so the phase angle is well defined.
    const GaussianState g0({3.0, 1.0}, 0.3 * c.c_b(), 0.05, 1.0);
    const auto a = evolve(HybridState::from_gaussian(g0), c, times, {1e-12, 1e-14});
    const auto b = evolve_phase_form(g0.center(), {g0.d0(), g0.b(), g0.theta() - 2.0 * std::arg(g0.center())},
                                     c, times, {1e-12, 1e-14});
    ASSERT_EQ(a.samples.size(), b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const GaussianState ga = a.samples[i].gaussian;
      const GaussianState gb = b[i].gaussian();
      EXPECT_NEAR(std::abs(ga.center() - gb.center()), 0.0, 1e-8);
      EXPECT_NEAR(ga.d0(), gb.d0(), 1e-8);
      EXPECT_NEAR(ga.b(), gb.b(), 1e-8);
      EXPECT_NEAR(std::remainder(ga.theta() - gb.theta(), 2 * std::numbers::pi) * ga.b(), 0.0, 1e-8);
    }
  }
}

TEST(HybridEvolver, TemperatureScalingSymmetry) {
  const SimConfig c0 = kerr_config(-0.01, {4.0, 0.0});
  SimConfig c1 = c0;
  c1.n_b = 0.6;
  const auto times = grid(10.0, 20);
  const auto a = evolve(HybridState::vacuum(), c0, times, {1e-12, 1e-14});
  const auto b = evolve(HybridState::thermal(0.6), c1, times, {1e-12, 1e-14});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const HybridState s = scale_temperature(a.samples[i].state, 0.6);
    EXPECT_NEAR(std::abs(s.beta - b.samples[i].state.beta), 0.0, 1e-9);
    EXPECT_NEAR(s.w1, b.samples[i].state.w1, 1e-8 * s.w1);
    EXPECT_NEAR(s.w2, b.samples[i].state.w2, 1e-8 * s.w1);
    EXPECT_NEAR(s.k, b.samples[i].state.k, 1e-8);
  }
}

TEST(HybridEvolver, FrozenShapeFixedStepDecouplesCenter) {
  const SimConfig c = kerr_config(-0.02, {3.0, 0.0}, 0.2);
  const auto times = grid(5.0, 50);
  EvolveOptions frozen;
  frozen.fixed_step = 0.01;
  frozen.freeze_shape = true;
  EvolveOptions full = frozen;
  full.freeze_shape = false;
  const auto a = evolve(HybridState::vacuum(), c, times, frozen);
  const auto b = evolve(HybridState::vacuum(), c, times, full);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(a.samples[i].state.beta, b.samples[i].state.beta);
    EXPECT_EQ(a.samples[i].state.w1, 1.0);
  }
}

TEST(HybridEvolver, FixedStepIsDeterministic) {
  const SimConfig c = kerr_config(-0.02, {3.0, 0.0}, 0.2, 0.1);
  const auto times = grid(5.0, 25);
  EvolveOptions o;
  o.fixed_step = 0.005;
  const auto a = evolve(HybridState::vacuum(), c, times, o);
  const auto b = evolve(HybridState::vacuum(), c, times, o);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_EQ(a.samples[i].state, b.samples[i].state);
}

TEST(HybridEvolver, PiecewiseDriveSwitchOff) {
  SimConfig c = kerr_config(0.0, {0.0, 0.0});
  c.drive = DriveSchedule({{0.0, {2.0, 0.0}}, {3.0, {0.0, 0.0}}});
  const auto times = grid(6.0, 60);
  const auto traj = evolve(HybridState::vacuum(), c, times, {1e-12, 1e-14});
  const complex b3 = complex{0.0, -4.0} * (1.0 - std::exp(-1.5));
  for (const auto& s : traj.samples) {
    if (s.t > 3.0) EXPECT_NEAR(std::abs(s.state.beta - b3 * std::exp(-0.5 * (s.t - 3.0))), 0.0, 1e-9);
  }
}

TEST(HybridEvolver, RotatingFrameMatchesLabFrame) {
  SimConfig c = kerr_config(0.0, {2.0, 0.0}, 0.5, 0.3);
  c.omega_r0 = 400.0;
  const double wd = *c.omega_r0 - c.detuning;
  const auto times = grid(6.0, 12);
  const auto hyb = evolve(HybridState::vacuum(), c, times, {1e-11, 1e-13});
  const auto lab = evolve_lab_frame({}, c, times, {1e-11, 1e-13});
  for (std::size_t i = 1; i < times.size(); ++i) {
    const complex rot = complex{lab[i].state.x_c, lab[i].state.p_c} * std::polar(1.0, wd * times[i]);
    const complex beta = hyb.samples[i].state.beta;
    EXPECT_LT(std::abs(rot - beta), 1e-2 * std::abs(beta) + 1e-3);
    const double d_lab = 0.5 * (lab[i].state.d_x + lab[i].state.d_p);
    EXPECT_NEAR(d_lab, hyb.samples[i].gaussian.d0(), 5e-3);
  }
  EXPECT_THROW(linear_lab_frame_rhs(0.0, {}, kerr_config(0.0, {1.0, 0.0})), std::invalid_argument);
}

TEST(HybridEvolver, TrajectoryPeaks) {
  const SimConfig c = kerr_config(-0.004, {0.4 / std::sqrt(0.004), 0.0});
  const auto times = grid(15.0, 300);
  const auto traj = evolve(HybridState::vacuum(), c, times);
  const TrajectoryPeaks p = trajectory_peaks(traj);
  EXPECT_GT(p.n_peak, 100.0);
  EXPECT_LT(p.n_peak, 130.0);
  EXPECT_GE(p.w1_max, 1.0);
  EXPECT_EQ(p.w1_max, traj.samples.front().state.w1);
}

TEST(HybridEvolver, RejectsUnsortedTimes) {
  const SimConfig c = kerr_config(-0.01, {1.0, 0.0});
  const std::vector<double> bad{0.0, 2.0, 1.0};
  EXPECT_THROW(evolve(HybridState::vacuum(), c, bad), std::invalid_argument);
}
