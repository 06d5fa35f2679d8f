#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrsim/fock_density.hpp"
#include "kerrsim/ode.hpp"
#include "kerrsim/sim_config.hpp"

namespace kerrsim {

/// Rotating-frame Hamiltonian diag(E_rf) + eps a^dag + eps^* a and the two
/// jump operators sqrt(rate_down) a, sqrt(rate_up) a^dag.
struct LindbladGenerator {
  /// E_rf(n) = sum_{k<n} [omega_r(k) - omega_d].
  Eigen::VectorXd energies;
  complex eps{0.0, 0.0};
  double rate_down = 0.0;  // kappa (n_b + 1)
  double rate_up = 0.0;    // kappa n_b

  long dim() const { return static_cast<long>(energies.size()); }
  Eigen::MatrixXcd hamiltonian() const;
  /// Dense Liouvillian acting on column-stacked rho; for small N only.
  Eigen::MatrixXcd liouvillian() const;
};

/// Generator at time t (the drive is sampled at t). Requires N >= 2.
LindbladGenerator build_generator(const SimConfig& config, long dim, double t = 0.0);

/// d(rho)/dt = i[rho, H] + rate_down D[a] rho + rate_up D[a^dag] rho using the
/// banded structure of a; O(N^2). The output is exactly Hermitian when rho is.
void lindblad_rhs(const LindbladGenerator& gen, const Eigen::MatrixXcd& rho,
                  Eigen::MatrixXcd& out);

struct Moments {
  complex mean_a{0.0, 0.0};
  complex mean_a2{0.0, 0.0};
  double mean_n = 0.0;
};

/// <a>, <a^2>, <a^dag a> by trace pairing with the truncated operators.
Moments moments(const FockDensityMatrix& rho);

struct OracleOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  std::optional<double> fixed_step;
  /// Population of the top level that aborts the run.
  double overflow_threshold = 1e-6;
  /// Top-5 population above which a warning is recorded.
  double warn_threshold = 1e-8;
};

struct OracleReport {
  ode::Stats stats;
  double max_trace_deficit = 0.0;
  double max_top_population = 0.0;
  std::vector<std::string> warnings;
};

using OracleObserver = std::function<void(double t, const FockDensityMatrix& rho)>;

/// Integrates the master equation from rho0, calling `observe` at every
/// sample time. rho is re-symmetrized after each accepted step.
/// Throws TruncationOverflow when the top level holds more than
/// `overflow_threshold` at a sample, IntegrationFailure on step underflow.
OracleReport evolve_oracle(const FockDensityMatrix& rho0, const SimConfig& config,
                           std::span<const double> sample_times, const OracleObserver& observe,
                           const OracleOptions& options = {});

/// Convenience wrapper keeping every sample (small N only).
std::vector<std::pair<double, FockDensityMatrix>> evolve_oracle_samples(
    const FockDensityMatrix& rho0, const SimConfig& config, std::span<const double> sample_times,
    const OracleOptions& options = {});

/// N = ceil(n_peak + 8 sqrt(W1_max n_peak) + 30).
long truncation_dimension(double n_peak, double w1_max);

/// Truncation from a hybrid pre-run from vacuum over [0, t_final].
long suggested_dimension(const SimConfig& config, double t_final);

}  // namespace kerrsim
