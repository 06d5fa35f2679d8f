#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kerrsim/fock_gaussian.hpp"
#include "kerrsim/gaussian_state.hpp"
#include "kerrsim/ode.hpp"
#include "kerrsim/sim_config.hpp"

namespace kerrsim {

/// Evolving hybrid variables: phase-space center beta and the Fock-space
/// shape parameters W1, W2, K.
struct HybridState {
  complex beta{1e-15, 0.0};
  double w1 = 1.0;
  double w2 = 1.0;
  double k = 0.0;

  /// Vacuum shape with a tiny seed center so arg(beta) is defined.
  static HybridState vacuum() { return {}; }
  /// Thermal shape W1 = c_b, W2 = 1 / c_b.
  static HybridState thermal(double n_b, complex beta = {1e-15, 0.0});
  static HybridState from_gaussian(const GaussianState& state);

  FockGaussianParams params() const;
  GaussianState gaussian() const;

  friend bool operator==(const HybridState&, const HybridState&) = default;
};

/// Derivatives of (beta, W1, W2, K). The returned HybridState holds
/// d(beta)/dt, dW1/dt, dW2/dt, dK/dt.
HybridState hybrid_rhs(double t, const HybridState& state, const SimConfig& config);

/// Shape in the phase-space form: D0, b and delta_theta = theta - 2 arg(beta).
struct PhaseShapeState {
  double d0 = 0.25;
  double b = 0.0;
  double delta_theta = 0.0;
};

PhaseShapeState phase_rhs(double t, complex beta, const PhaseShapeState& shape,
                          const SimConfig& config);

/// Lab-frame center and covariances of a linear resonator.
struct LabFrameState {
  double x_c = 0.0;
  double p_c = 0.0;
  double d_x = 0.25;
  double d_p = 0.25;
  double d_xp = 0.0;
};

/// Lab-frame equations with omega_r = config.omega_r0 (required) and the real
/// drive force 2 Re(eps e^{-i omega_d t}), omega_d = omega_r0 - detuning.
/// The nonlinearity is ignored.
LabFrameState linear_lab_frame_rhs(double t, const LabFrameState& state, const SimConfig& config);

struct EvolveOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Fixed-step RK4 with this step instead of the adaptive integrator.
  std::optional<double> fixed_step;
  /// Integrate only beta; W1, W2, K stay at their initial values.
  bool freeze_shape = false;
  /// Check 0 < W2 <= W1 at every sample.
  bool check_physicality = true;
};

struct HybridSample {
  double t;
  HybridState state;
  GaussianState gaussian;
};

struct HybridTrajectory {
  std::vector<HybridSample> samples;
  ode::Stats stats;
};

/// Integrates the hybrid equations, sampling at `sample_times` (increasing,
/// starting at or after 0). Drive discontinuities are integrated segment by
/// segment. Throws IntegrationFailure on step underflow and PhysicsError if
/// a sample leaves 0 < W2 <= W1 by more than 1e-10.
HybridTrajectory evolve(const HybridState& initial, const SimConfig& config,
                        std::span<const double> sample_times, const EvolveOptions& options = {});

struct PhaseSample {
  double t;
  complex beta;
  PhaseShapeState shape;
  GaussianState gaussian() const;
};

/// Same dynamics in the (beta, D0, b, delta_theta) form.
std::vector<PhaseSample> evolve_phase_form(complex beta0, const PhaseShapeState& shape0,
                                           const SimConfig& config,
                                           std::span<const double> sample_times,
                                           const EvolveOptions& options = {});

struct LabFrameSample {
  double t;
  LabFrameState state;
};

std::vector<LabFrameSample> evolve_lab_frame(const LabFrameState& initial, const SimConfig& config,
                                             std::span<const double> sample_times,
                                             const EvolveOptions& options = {});

/// W1 -> c_b W1, W2 -> W2 / c_b: maps a T_b = 0 solution onto the solution at
/// bath occupation n_b.
HybridState scale_temperature(const HybridState& state, double n_b);

/// Largest |beta|^2 and W1 along a trajectory.
struct TrajectoryPeaks {
  double n_peak = 0.0;
  double w1_max = 1.0;
};
TrajectoryPeaks trajectory_peaks(const HybridTrajectory& trajectory);

}  // namespace kerrsim
