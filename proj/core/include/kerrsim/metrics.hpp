#pragma once

#include <functional>

#include <Eigen/Dense>

#include "kerrsim/fock_density.hpp"
#include "kerrsim/fock_gaussian.hpp"
#include "kerrsim/gaussian_state.hpp"

namespace kerrsim {

struct FidelityOptions {
  /// Eigenvalues below -negative_tol are an error; those in between are clipped.
  double negative_tol = 1e-10;
  /// Eigenvalues below support_tol * lambda_max are dropped from the support.
  double support_tol = 1e-12;
  /// Max |rho - rho^dag| relative to max |rho| accepted as Hermitian.
  double hermitian_tol = 1e-8;
};

/// Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 / (Tr rho1 Tr rho2).
/// Throws NonHermitianInput, NegativeSpectrum, std::invalid_argument on
/// mismatched dimensions.
double fidelity(const FockDensityMatrix& rho1, const FockDensityMatrix& rho2,
                const FidelityOptions& options = {});

/// Fidelity against a low-rank state rho2 = L L^dag. `apply_rho1(X)` returns
/// rho1 X; `trace_rho1` is Tr rho1. Cost is one application plus a k x k
/// eigenproblem for k columns of L.
double fidelity_low_rank(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply_rho1,
                         double trace_rho1, const Eigen::MatrixXcd& factor);

double fidelity_low_rank(const FockDensityMatrix& rho1, const Eigen::MatrixXcd& factor);

/// <psi|rho|psi> / (Tr rho |psi|^2).
double fidelity_pure(const Eigen::VectorXcd& psi, const FockDensityMatrix& rho);

/// Columns sqrt(p_k) D(alpha) S(xi) |k> of the displaced squeezed thermal
/// state, thermal weights p_k kept while above weight_cut. Throws
/// TruncationOverflow if the top 5 levels hold more than 1e-6.
Eigen::MatrixXcd dsts_factor(complex center, const DstsShape& shape, long dim,
                             double weight_cut = 1e-14);

FockDensityMatrix dsts_density(complex center, const DstsShape& shape, long dim);

/// Same as dsts_factor with the shape read off a GaussianState.
Eigen::MatrixXcd gaussian_factor(const GaussianState& state, long dim);

struct GaussianFit {
  GaussianState state;
  double fit_infidelity = 0.0;
};

/// Gaussian state with the moments of rho and its infidelity to rho.
GaussianFit gaussian_fit(const FockDensityMatrix& rho);

/// 1 - F between rho and the Gaussian state represented in rho's basis.
double gaussian_infidelity(const FockDensityMatrix& rho, const GaussianState& state);

/// 1 - F between rho and the coherent state at `center`.
double coherent_infidelity(const FockDensityMatrix& rho, complex center);

/// (2/pi) Tr[D(-alpha) rho D(alpha) (-1)^{a^dag a}]. Throws TruncationOverflow
/// when |alpha|^2 is within 10 levels of the dimension.
double wigner_numeric(const FockDensityMatrix& rho, complex alpha);

/// (1/pi) <alpha|rho|alpha>.
double husimi_numeric(const FockDensityMatrix& rho, complex alpha);

/// Husimi Q of the Fock-space Gaussian matrix, evaluated on its support band.
double husimi_numeric(const FockGaussianParams& params, complex alpha);

/// 0.04 [4 (d0 + b)]^3 / |beta|^2.
double conversion_infidelity_estimate(double d0, double b, double beta_abs);

/// 1 - F between the Fock-space Gaussian matrix and the displaced squeezed
/// thermal state of to_phase_space(params); with `use_corrected_center` the
/// latter is centered at corrected_center(params).
double conversion_infidelity(const FockGaussianParams& params, bool use_corrected_center = false);

/// Variance along the line center + s e^{i theta/2} from a least-squares fit
/// of log W(s) = c - s^2 / (2 v) over |s| <= half_width, `points` samples.
double short_axis_variance(const std::function<double(complex)>& wigner_at, complex center,
                           double theta, double half_width, int points = 41);

}  // namespace kerrsim
