#include "kerrsim/gaussian_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kerrsim/errors.hpp"

namespace kerrsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHeisenbergTol = 1e-9;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can return exactly 2 pi after the shift for tiny negative inputs
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

// Gaussian with variances (v_min, v_max) along the rotated axes.
double rotated_gaussian(const GaussianState& s, double x, double p, double v_min, double v_max) {
  const complex rot = std::polar(1.0, -0.5 * s.theta());
  const complex d = (complex{x, p} - s.center()) * rot;
  const double e = d.real() * d.real() / (2.0 * v_min) + d.imag() * d.imag() / (2.0 * v_max);
  return std::exp(-e) / (kTwoPi * std::sqrt(v_min * v_max));
}

}  // namespace

GaussianState::GaussianState(complex center, double d0, double b, double theta)
    : center_(center), d0_(d0), b_(b), theta_(b == 0.0 ? 0.0 : wrap_angle(theta)) {
  if (!(d0 > 0.0) || !(b >= 0.0) || b > d0 || !std::isfinite(d0) || !std::isfinite(b) ||
      !std::isfinite(theta) || !std::isfinite(center.real()) || !std::isfinite(center.imag())) {
    throw std::invalid_argument("GaussianState: need d0 > 0 and 0 <= b <= d0 (d0=" +
                                std::to_string(d0) + ", b=" + std::to_string(b) + ")");
  }
  if (16.0 * (d0 - b) * (d0 + b) < 1.0 - kHeisenbergTol) {
    throw std::invalid_argument("GaussianState: uncertainty bound violated");
  }
}

GaussianState GaussianState::thermal(double n_th, complex center) {
  return {center, 0.25 + 0.5 * n_th, 0.0, 0.0};
}

double quadrature_variance(const GaussianState& state, double phi) {
  return state.d0() - state.b() * std::cos(2.0 * phi - state.theta());
}

double wigner(const GaussianState& state, double x, double p) {
  return rotated_gaussian(state, x, p, state.min_variance(), state.max_variance());
}

double husimi_q(const GaussianState& state, double x, double p) {
  return rotated_gaussian(state, x, p, state.min_variance() + 0.25, state.max_variance() + 0.25);
}

GaussianState from_moments(complex mean_a, complex mean_a2, double mean_n) {
  const double d0 = 0.5 * (mean_n + 0.5 - std::norm(mean_a));
  // <a^2> - <a>^2 = (D_x - D_p) + 2 i D_xp = -2 b e^{i theta}
  const complex c2 = mean_a2 - mean_a * mean_a;
  const double b = 0.5 * std::abs(c2);
  if (!(d0 > 0.0) || b > d0 + kHeisenbergTol ||
      16.0 * (d0 * d0 - b * b) < 1.0 - kHeisenbergTol) {
    throw NonPhysicalMoments("moments do not describe a physical Gaussian state (d0=" +
                             std::to_string(d0) + ", b=" + std::to_string(b) + ")");
  }
  const double theta = b == 0.0 ? 0.0 : std::arg(-c2);
  // Round-off can push a pure state a hair past the bound; clamp onto it.
  const double b_phys = std::min(b, std::sqrt(std::max(0.0, d0 * d0 - 1.0 / 16.0)));
  return {mean_a, d0, b_phys, theta};
}

DstsShape to_dsts(const GaussianState& state) {
  DstsShape shape;
  shape.n_th = thermal_photons(state);
  shape.r = 0.5 * std::atanh(state.b() / state.d0());
  shape.theta = state.theta();
  return shape;
}

GaussianState from_dsts(const DstsShape& shape, complex center) {
  if (shape.r < 0.0 || shape.n_th < 0.0) {
    throw std::invalid_argument("DstsShape: r and n_th must be nonnegative");
  }
  const double scale = 0.25 + 0.5 * shape.n_th;
  return {center, scale * std::cosh(2.0 * shape.r), scale * std::sinh(2.0 * shape.r), shape.theta};
}

double thermal_photons(const GaussianState& state) {
  const double det = (state.d0() - state.b()) * (state.d0() + state.b());
  return std::max(0.0, 2.0 * std::sqrt(det) - 0.5);
}

double mean_photon(const GaussianState& state) {
  return std::norm(state.center()) + 2.0 * state.d0() - 0.5;
}

double temperature_from_occupation(double n_th, double omega) {
  if (n_th <= 0.0) return 0.0;
  // coth(x) = 1 + 2n  <=>  x = atanh(1 / (1 + 2n)) = log1p(1/n) / 2
  return omega / std::log1p(1.0 / n_th);
}

double occupation_from_temperature(double temperature, double omega) {
  if (temperature <= 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temperature);
}

double effective_temperature(const GaussianState& state, double omega_r0) {
  return temperature_from_occupation(thermal_photons(state), omega_r0);
}

}  // namespace kerrsim
