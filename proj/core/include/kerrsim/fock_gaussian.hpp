#pragma once

#include <complex>

#include "kerrsim/fock_density.hpp"
#include "kerrsim/gaussian_state.hpp"

namespace kerrsim {

/// Parameters of the Fock-space ("sheared") Gaussian density matrix
///
///   rho_nm = (2 pi W1 |beta|^2)^{-1/2}
///            exp[-(s - |beta|^2)^2 / (2 W1 |beta|^2) - (n-m)^2 / (8 W2 |beta|^2)]
///            exp[i phi (n-m) - i (2K / |beta|^2) (s - |beta|^2)(n-m)],   s = (n+m)/2.
///
/// W1 |beta|^2 is the photon-number variance, W2 sets the coherence width
/// across the diagonal and K is the shear produced by nonlinearity.
struct FockGaussianParams {
  double beta_abs = 1.0;
  double phi_beta = 0.0;
  double w1 = 1.0;
  double w2 = 1.0;
  double k = 0.0;

  complex beta() const { return std::polar(beta_abs, phi_beta); }

  /// Throws std::invalid_argument unless beta_abs > 0 and 0 < w2 <= w1.
  void validate(double tol = 1e-10) const;
};

complex density_element(const FockGaussianParams& params, long n, long m);

/// Fock range [lo, hi] outside which the matrix is treated as zero
/// (8 standard deviations of the photon-number distribution).
struct FockWindow {
  long lo = 0;
  long hi = 0;
};
FockWindow support_window(const FockGaussianParams& params, double sigmas = 8.0);

/// Dense N x N matrix, elements outside support_window set to zero.
FockDensityMatrix density_matrix(const FockGaussianParams& params, long dim);

/// rho * X for the Fock-space Gaussian matrix without materializing it; X has one row per
/// Fock level. Only the banded support of rho is visited.
Eigen::MatrixXcd apply_density(const FockGaussianParams& params, const Eigen::MatrixXcd& x);

/// Sum of the diagonal over the support window.
double density_trace(const FockGaussianParams& params);

GaussianState to_phase_space(const FockGaussianParams& params);

/// Throws DegenerateCenter when the state center is zero.
FockGaussianParams from_phase_space(const GaussianState& state);

/// <a> including the first 1/|beta| correction.
complex corrected_center(const FockGaussianParams& params);

/// (sqrt(W1/W2) - 1) / 2.
double thermal_photons(const FockGaussianParams& params);

}  // namespace kerrsim
