#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kerrsim/errors.hpp"
#include "kerrsim/gaussian_state.hpp"
#include "kerrsim/units.hpp"

using namespace kerrsim;

namespace {

constexpr double pi = std::numbers::pi;

GaussianState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = 1.5 * u(rng);
  const double n_th = 0.8 * u(rng);
  const double theta = 2.0 * pi * u(rng);
  const complex c{6.0 * u(rng) - 3.0, 6.0 * u(rng) - 3.0};
  return from_dsts({r, theta, n_th}, c);
}

}  // namespace

TEST(GaussianState, VacuumDefaults) {
  const GaussianState v;
  EXPECT_DOUBLE_EQ(v.d0(), 0.25);
  EXPECT_DOUBLE_EQ(v.b(), 0.0);
  EXPECT_DOUBLE_EQ(v.squeeze_factor(), 1.0);
  EXPECT_DOUBLE_EQ(v.unsqueeze_factor(), 1.0);
  EXPECT_DOUBLE_EQ(thermal_photons(v), 0.0);
  EXPECT_DOUBLE_EQ(mean_photon(v), 0.0);
}

TEST(GaussianState, RejectsUnphysicalShapes) {
  EXPECT_THROW(GaussianState({}, -0.1, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(GaussianState({}, 0.25, 0.3, 0.0), std::invalid_argument);
  EXPECT_THROW(GaussianState({}, 0.2, 0.0, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(GaussianState({}, 0.5, std::sqrt(0.25 - 1.0 / 16), 1.0));
}

TEST(GaussianState, ThetaWrapsIntoRange) {
  const GaussianState s({}, 1.0, 0.5, -0.5);
  EXPECT_NEAR(s.theta(), 2 * pi - 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(GaussianState({}, 1.0, 0.0, 2.0).theta(), 0.0);
}

TEST(GaussianState, QuadratureVarianceExtremes) {
  const GaussianState s({1.0, 2.0}, 1.0, 0.6, 1.2);
  EXPECT_NEAR(quadrature_variance(s, 0.6), 0.4, 1e-14);
  EXPECT_NEAR(quadrature_variance(s, 0.6 + pi / 2), 1.6, 1e-14);
  for (int i = 0; i < 50; ++i) {
    const double v = quadrature_variance(s, 0.1 * i);
    EXPECT_GE(v, s.min_variance() - 1e-14);
    EXPECT_LE(v, s.max_variance() + 1e-14);
  }
}

TEST(GaussianState, WignerAndHusimiIntegrateToOne) {
  const GaussianState s({0.5, -0.3}, 0.9, 0.7, 2.1);
  const double h = 0.02;
  double wsum = 0.0, qsum = 0.0;
  for (double x = -8.0; x <= 8.0; x += h) {
    for (double p = -8.0; p <= 8.0; p += h) {
      wsum += wigner(s, x, p);
      qsum += husimi_q(s, x, p);
    }
  }
  EXPECT_NEAR(wsum * h * h, 1.0, 1e-6);
  EXPECT_NEAR(qsum * h * h, 1.0, 1e-6);
  EXPECT_NEAR(wigner(GaussianState::vacuum(), 0.0, 0.0), 2.0 / pi, 1e-14);
}

TEST(GaussianState, MomentsRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const GaussianState s = random_state(rng);
    const complex c = s.center();
    // <a^2> = c^2 + (squeeze part), <n> = |c|^2 + 2 d0 - 1/2.
    const complex a2 = c * c - 2.0 * s.b() * std::polar(1.0, s.theta());
    const GaussianState t = from_moments(c, a2, mean_photon(s));
    EXPECT_NEAR(t.d0(), s.d0(), 1e-10);
    EXPECT_NEAR(t.b(), s.b(), 1e-10);
    if (s.b() > 1e-6) EXPECT_NEAR(std::remainder(t.theta() - s.theta(), 2 * pi), 0.0, 1e-8);
  }
}

TEST(GaussianState, NonPhysicalMomentsThrow) {
  EXPECT_THROW(from_moments({0.0, 0.0}, {0.0, 0.0}, -0.2), NonPhysicalMoments);
  EXPECT_THROW(from_moments({0.0, 0.0}, {2.0, 0.0}, 0.1), NonPhysicalMoments);
}

TEST(GaussianState, DstsRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const GaussianState s = random_state(rng);
    const DstsShape d = to_dsts(s);
    const GaussianState t = from_dsts(d, s.center());
    EXPECT_NEAR(t.d0(), s.d0(), 1e-12 * s.d0());
    EXPECT_NEAR(t.b(), s.b(), 1e-12 * s.d0());
    EXPECT_NEAR(thermal_photons(s), d.n_th, 1e-10);
  }
}

TEST(GaussianState, ThermalStateClosedForms) {
  const GaussianState t = GaussianState::thermal(0.7);
  EXPECT_NEAR(t.d0(), 0.25 * (1 + 2 * 0.7), 1e-15);
  EXPECT_NEAR(thermal_photons(t), 0.7, 1e-14);
  EXPECT_NEAR(mean_photon(t), 0.7, 1e-14);
}

TEST(GaussianState, TemperatureInversions) {
  const double omega = units::angular(6e9);
  const double t_bath = units::rad_per_s_from_kelvin(0.05);
  const double n = occupation_from_temperature(t_bath, omega);
  EXPECT_NEAR(n, 1.0 / std::expm1(omega / t_bath), 1e-18);
  EXPECT_NEAR(temperature_from_occupation(n, omega), t_bath, 1e-9 * t_bath);
  EXPECT_DOUBLE_EQ(occupation_from_temperature(0.0, omega), 0.0);
  EXPECT_DOUBLE_EQ(effective_temperature(GaussianState::coherent({3.0, 0.0}), omega), 0.0);
  EXPECT_NEAR(units::kelvin(effective_temperature(GaussianState::thermal(n), omega)), 0.05, 1e-12);
}
