#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kerrsim/errors.hpp"
#include "kerrsim/hybrid_evolver.hpp"
#include "kerrsim/steady_state.hpp"

using namespace kerrsim;

namespace {

SimConfig physical(double kappa, double eta, double detuning, complex eps, double n_b) {
  SimConfig c;
  c.kappa = kappa;
  c.detuning = detuning;
  c.nonlinearity = NonlinearityModel::kerr(eta);
  c.drive = DriveSchedule::constant(eps);
  c.n_b = n_b;
  return c;
}

SimConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double kappa = 0.5 + 2.0 * u(rng);
  const double eta = (u(rng) < 0.5 ? -1.0 : 1.0) * kappa * (0.001 + 0.05 * u(rng));
  const double dw = -3.0 + 3.8 * u(rng);
  const double eps_t = 0.02 + 0.4 * u(rng);
  const double sign = eta < 0 ? -1.0 : 1.0;
  const double eps = eps_t * kappa * std::sqrt(kappa / std::abs(eta));
  return physical(kappa, eta, -sign * dw * kappa, std::polar(eps, 6.28 * u(rng)), 0.8 * u(rng));
}

}  // namespace

TEST(SteadyState, RootsSolveCubic) {
  for (double dw : {-2.0, 0.0, 0.5, 2.0, 5.0}) {
    for (double e : {0.05, 0.4, 1.0, 3.0}) {
      for (const SteadyBranch& b : steady_centers(e, dw)) {
        const double n = b.n_tilde;
        EXPECT_NEAR(n * ((n - dw) * (n - dw) + 0.25), e * e, 1e-10 * std::max(1.0, e * e));
        EXPECT_NEAR(std::norm(b.beta), n, 1e-10 * std::max(1.0, n));
      }
    }
  }
}

TEST(SteadyState, PhysicalCentersAreStationary) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const SimConfig c = random_config(rng);
    for (const SteadyBranch& b : steady_centers(c)) {
      const HybridState d = hybrid_rhs(0.0, HybridState{b.beta, 1.0, 1.0, 0.0}, c);
      EXPECT_LT(std::abs(d.beta), 1e-9 * c.kappa * std::max(1.0, std::abs(b.beta)));
    }
  }
}

TEST(SteadyState, BistableBranchesLabeled) {
  const auto br = steady_centers(1.0, 3.0);
  ASSERT_EQ(br.size(), 3u);
  EXPECT_EQ(br[0].label, BranchLabel::lower);
  EXPECT_EQ(br[1].label, BranchLabel::middle);
  EXPECT_EQ(br[2].label, BranchLabel::upper);
  EXPECT_LT(br[0].n_tilde, br[1].n_tilde);
  EXPECT_LT(br[1].n_tilde, br[2].n_tilde);
  EXPECT_GT(cubic_discriminant(1.0, 3.0), 0.0);
  const auto one = steady_centers(0.4, 0.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].label, BranchLabel::single);
  EXPECT_EQ(to_string(BranchLabel::middle), "middle");
}

TEST(SteadyState, BistabilityEdgesAreDoubleRoots) {
  EXPECT_FALSE(bistability_bounds(0.5).has_value());
  const auto bb = bistability_bounds(3.0);
  ASSERT_TRUE(bb.has_value());
  EXPECT_LT(bb->eps_low, bb->eps_high);
  EXPECT_NEAR(cubic_discriminant(bb->eps_low, 3.0), 0.0, 1e-8);
  EXPECT_NEAR(cubic_discriminant(bb->eps_high, 3.0), 0.0, 1e-8);
  EXPECT_EQ(steady_centers(0.5 * (bb->eps_low + bb->eps_high), 3.0).size(), 3u);
}

TEST(SteadyState, CriticalPoint) {
  EXPECT_TRUE(is_critical_point(std::pow(3.0, -0.75), std::sqrt(3.0) / 2));
  EXPECT_TRUE(is_critical_point(0.44, std::sqrt(3.0) / 2));
  EXPECT_FALSE(is_critical_point(0.40, 0.0));
}

TEST(SteadyState, ShapeIsFixedPointOfHybridEquations) {
  std::mt19937_64 rng(42);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const SimConfig c = random_config(rng);
    for (const SteadyBranch& b : steady_centers(c)) {
      SteadyShape s;
      try {
        s = steady_shape(b.beta, c);
      } catch (const InstabilityBound&) {
        continue;
      }
      const HybridState h = HybridState::from_gaussian(s.state);
      const HybridState d = hybrid_rhs(0.0, h, c);
      const double scale = c.kappa * std::max(1.0, h.w1);
      EXPECT_LT(std::abs(d.w1), 1e-8 * scale);
      EXPECT_LT(std::abs(d.w2), 1e-8 * scale);
      EXPECT_LT(std::abs(d.k), 1e-8 * scale);
      ++checked;
    }
  }
  EXPECT_GT(checked, 80);
}

TEST(SteadyState, LinearizedMomentsAgree) {
  std::mt19937_64 rng(1234);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const SimConfig c = random_config(rng);
    for (const SteadyBranch& b : steady_centers(c)) {
      SteadyShape s;
      try {
        s = steady_shape(b.beta, c);
      } catch (const InstabilityBound&) {
        continue;
      }
      const GaussianState d = drummond_state(b.beta, c);
      const double tol = 1e-10 * std::max(1.0, s.state.d0());
      EXPECT_NEAR(d.d0(), s.state.d0(), tol);
      EXPECT_NEAR(d.b(), s.state.b(), tol);
      EXPECT_NEAR(std::remainder(d.theta() - s.state.theta(), 2 * std::numbers::pi) * d.b(), 0.0, tol);
      ++checked;
    }
  }
  EXPECT_GT(checked, 80);
}

TEST(SteadyState, InstabilityBoundOnMiddleBranch) {
  const SimConfig c = physical(1.0, -1.0, 3.0, {1.0, 0.0}, 0.0);
  const auto br = steady_centers(c);
  ASSERT_EQ(br.size(), 3u);
  EXPECT_THROW(steady_shape(br[1].beta, c), InstabilityBound);
  EXPECT_NO_THROW(steady_shape(br[0].beta, c));
}

TEST(SteadyState, SmallDampingLimitKnownValue) {
  const auto r = dykman_limit(2.0, 0.0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(std::real(r[0].q), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r[0].xi, 0.25 * std::log(5.0), 1e-12);
  EXPECT_THROW(dykman_limit(0.0, 0.0), std::invalid_argument);
  const auto two = dykman_limit(0.1, 0.0);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_TRUE(two[0].branch_ambiguous);
  EXPECT_EQ(two[0].label, BranchLabel::lower);
  EXPECT_EQ(two[1].label, BranchLabel::upper);
}

TEST(SteadyState, SmallDampingLimitMatchesSteadyShape) {
  // omega_d - omega_r0 = delta, kappa = 1e-4 |delta|.
  for (double delta : {-1.0, 1.0}) {
    for (double eps : {0.25, 0.6, 1.5}) {
      for (double n_b : {0.0, 0.3}) {
        const double eta = -1.0;
        const SimConfig c = physical(1e-4, eta, -delta, {eps, 0.0}, n_b);
        const double bp = eps * eps * eta / (delta * delta * delta);
        for (const DykmanResult& d : dykman_limit(bp, n_b)) {
          const double q2 = std::real(d.q * d.q);
          const auto branches = steady_centers(c);
          const SteadyBranch* best = nullptr;
          for (const auto& b : branches) {
            const double s2 = eta * std::norm(b.beta) / delta;
            if (!best || std::abs(s2 - q2) < std::abs(eta * std::norm(best->beta) / delta - q2)) best = &b;
          }
          ASSERT_NE(best, nullptr);
          SCOPED_TRACE("delta=" + std::to_string(delta) + " eps=" + std::to_string(eps) +
                       " label=" + std::string(to_string(best->label)));
          const SteadyShape s = steady_shape(best->beta, c);
          const DstsShape f = to_dsts(s.state);
          EXPECT_NEAR(f.r, std::abs(d.xi), 1e-3 * std::max(std::abs(d.xi), 1e-3))
              << "delta=" << delta << " eps=" << eps << " bp=" << bp;
          EXPECT_NEAR(f.n_th, d.n_th, 1e-3 * std::max(d.n_th, 1e-3));
        }
      }
    }
  }
}

TEST(SteadyState, ThreeDbBoundOnCoarseGrid) {
  ThreeDbSweep sw;
  sw.eps_points = 10;
  sw.dw_points = 12;
  const ThreeDbReport r = three_db_bound_check(sw);
  EXPECT_EQ(r.points, 10 * 12 * 2);
  EXPECT_LT(r.max_squeeze, 2.0);
  EXPECT_GT(r.min_scaled_min_variance, 0.5);
}

TEST(SteadyState, LinearConfigHasCoherentCenter) {
  const SimConfig c = physical(1.0, 0.0, 0.5, {1.0, 0.0}, 0.0);
  const auto br = steady_centers(c);
  ASSERT_EQ(br.size(), 1u);
  EXPECT_NEAR(std::abs(br[0].beta - complex{0.0, -1.0} / complex{0.5, 0.5}), 0.0, 1e-12);
}
