#pragma once

#include <complex>

namespace kerrsim {

using complex = std::complex<double>;

/// Squeeze/thermal factorization of a Gaussian shape (displaced squeezed
/// thermal state): squeeze magnitude r, squeeze angle theta, thermal
/// occupation n_th.
struct DstsShape {
  double r = 0.0;
  double theta = 0.0;
  double n_th = 0.0;
};

/// Single-mode Gaussian state in the rotating frame.
///
/// The quadrature x_phi = (a e^{-i phi} + a^dag e^{i phi}) / 2 has variance
/// d0 - b cos(2 phi - theta), so d0 -/+ b are the minimum/maximum variances
/// and the short axis points along theta / 2. Vacuum has d0 = 1/4, b = 0.
class GaussianState {
 public:
  /// Vacuum.
  GaussianState() = default;

  /// Throws std::invalid_argument unless d0 > 0, 0 <= b <= d0 and
  /// 16 (d0^2 - b^2) >= 1 - 1e-9.
  GaussianState(complex center, double d0, double b, double theta);

  static GaussianState vacuum() { return {}; }
  static GaussianState coherent(complex center) { return {center, 0.25, 0.0, 0.0}; }
  static GaussianState thermal(double n_th, complex center = {});

  complex center() const noexcept { return center_; }
  double d0() const noexcept { return d0_; }
  double b() const noexcept { return b_; }
  /// Doubled short-axis angle, in [0, 2 pi).
  double theta() const noexcept { return theta_; }

  double min_variance() const noexcept { return d0_ - b_; }
  double max_variance() const noexcept { return d0_ + b_; }

  /// [4 (d0 - b)]^{-1}; above 2 means squeezing beyond 3 dB.
  double squeeze_factor() const noexcept { return 1.0 / (4.0 * (d0_ - b_)); }
  /// 4 (d0 + b).
  double unsqueeze_factor() const noexcept { return 4.0 * (d0_ + b_); }

  GaussianState with_center(complex c) const { return {c, d0_, b_, theta_}; }

  friend bool operator==(const GaussianState&, const GaussianState&) = default;

 private:
  complex center_{0.0, 0.0};
  double d0_ = 0.25;
  double b_ = 0.0;
  double theta_ = 0.0;
};

double quadrature_variance(const GaussianState& state, double phi);

/// Wigner function at (x, p), with center = x_c + i p_c.
double wigner(const GaussianState& state, double x, double p);

/// Husimi Q function at (x, p); same Gaussian with both variances + 1/4.
double husimi_q(const GaussianState& state, double x, double p);

/// Gaussian state with the given <a>, <a^2>, <a^dag a>.
/// Throws NonPhysicalMoments when the implied covariance is not a physical
/// Gaussian covariance (tolerance 1e-9 on the uncertainty bound).
GaussianState from_moments(complex mean_a, complex mean_a2, double mean_n);

DstsShape to_dsts(const GaussianState& state);
GaussianState from_dsts(const DstsShape& shape, complex center);

/// Thermal photon number 2 sqrt(d0^2 - b^2) - 1/2.
double thermal_photons(const GaussianState& state);

/// |center|^2 + 2 d0 - 1/2.
double mean_photon(const GaussianState& state);

/// Temperature T with coth(omega / 2T) = 1 + 2 n_th, in the units of omega
/// (hbar = k_B = 1). Returns 0 for a pure state.
double effective_temperature(const GaussianState& state, double omega_r0);

/// Same inversion for a bare thermal occupation.
double temperature_from_occupation(double n_th, double omega);

/// Bose occupation 1 / (exp(omega / T) - 1); 0 for T = 0.
double occupation_from_temperature(double temperature, double omega);

}  // namespace kerrsim
