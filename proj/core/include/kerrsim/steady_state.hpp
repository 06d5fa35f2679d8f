#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "kerrsim/gaussian_state.hpp"
#include "kerrsim/sim_config.hpp"

namespace kerrsim {

enum class BranchLabel { single, lower, middle, upper };

std::string_view to_string(BranchLabel label);

/// Classical steady amplitude. In the dimensionless overload beta is in units
/// of sqrt(kappa / |eta|); the SimConfig overload returns physical beta.
struct SteadyBranch {
  complex beta{0.0, 0.0};
  /// n_st |eta| / kappa.
  double n_tilde = 0.0;
  BranchLabel label = BranchLabel::single;
};

/// Roots of n [(n - dw)^2 + 1/4] = eps^2, in increasing n: three labeled
/// branches when the cubic discriminant is positive, otherwise one.
std::vector<SteadyBranch> steady_centers(double eps_tilde, double delta_omega_tilde,
                                         int sign_eta = -1);
std::vector<SteadyBranch> steady_centers(const SimConfig& config);

/// Discriminant of the cubic above: > 0 three real roots, < 0 one.
double cubic_discriminant(double eps_tilde, double delta_omega_tilde);

/// Bistability edges (|eps_-|, |eps_+|) in eps_tilde for delta_omega_tilde > sqrt(3)/2.
struct BistabilityBounds {
  double eps_low;
  double eps_high;
  double n_low;   // merging roots at eps_low
  double n_high;  // merging roots at eps_high
};
std::optional<BistabilityBounds> bistability_bounds(double delta_omega_tilde);

/// True within `tol` of (3^{-3/4}, sqrt(3)/2) where all three roots merge.
bool is_critical_point(double eps_tilde, double delta_omega_tilde, double tol = 5e-3);

struct SteadyShape {
  GaussianState state;
  double squeeze_factor = 1.0;
  double unsqueeze_factor = 1.0;
  /// theta - 2 arg(beta).
  double delta_theta = 0.0;
};

/// Steady shape around a steady center of a constant-drive config. Throws
/// InstabilityBound when 2 eta_beta |beta|^2 sin(delta_theta) >= kappa.
SteadyShape steady_shape(complex beta, const SimConfig& config);

struct ThreeDbSweep {
  double eps_max = 0.43;
  double dw_min = -3.0;
  double dw_max = 0.8;
  int eps_points = 50;
  int dw_points = 100;
  std::vector<double> n_b_values{0.0, 0.5};
};

struct ThreeDbReport {
  double max_squeeze = 0.0;
  /// min over points of 4 (D0 - b) / (1 + 2 n_b).
  double min_scaled_min_variance = 1e300;
  long points = 0;
  long branches = 0;
  long instability_skipped = 0;
};

ThreeDbReport three_db_bound_check(const ThreeDbSweep& sweep);

/// Steady moments from the linearized fluctuation equations around beta
/// (independent of the Gaussian shape formulas), Kerr model only.
struct DrummondMoments {
  complex mean_a{0.0, 0.0};
  complex mean_a2{0.0, 0.0};
  double mean_n = 0.0;
};
DrummondMoments drummond_moments(complex beta, const SimConfig& config);
GaussianState drummond_state(complex beta, const SimConfig& config);

/// Small-damping squeezing of the steady state.
struct DykmanResult {
  BranchLabel label = BranchLabel::single;
  complex q{0.0, 0.0};
  /// Signed squeeze parameter; negative (theta = pi) on the lower branch.
  double xi = 0.0;
  double n_th = 0.0;
  bool branch_ambiguous = false;
};

/// beta_param = eps^2 eta / (omega_d - omega_r0)^3. For 0 < beta_param < 4/27
/// the upper (largest Q) and lower (middle Q) branches are both returned and
/// flagged ambiguous; for
/// larger beta_param the single real root; for beta_param < 0 the imaginary
/// root. Throws std::invalid_argument for beta_param == 0.
std::vector<DykmanResult> dykman_limit(double beta_param, double n_b);

}  // namespace kerrsim
