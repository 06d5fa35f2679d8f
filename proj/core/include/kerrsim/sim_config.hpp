#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace kerrsim {

using complex = std::complex<double>;

/// Photon-number-dependent resonator frequency, omega_r(n) - omega_r0.
class NonlinearityModel {
 public:
  using Fn = std::function<double(double)>;

  /// Linear resonator.
  NonlinearityModel() : NonlinearityModel(kerr(0.0)) {}

  /// omega_r(n) = omega_r0 + eta n.
  static NonlinearityModel kerr(double eta);
  /// Arbitrary shift and its derivative d(omega_r)/dn.
  static NonlinearityModel custom(Fn shift, Fn slope);

  double shift(double n) const { return shift_(n); }
  double slope(double n) const { return slope_(n); }
  /// Kerr slope if this is a Kerr model.
  std::optional<double> kerr_eta() const { return eta_; }

 private:
  NonlinearityModel(Fn shift, Fn slope, std::optional<double> eta)
      : shift_(std::move(shift)), slope_(std::move(slope)), eta_(eta) {}

  Fn shift_;
  Fn slope_;
  std::optional<double> eta_;
};

/// Piecewise-constant complex drive amplitude epsilon(t) (rad/s).
class DriveSchedule {
 public:
  struct Segment {
    double t_start;
    complex amplitude;
  };

  DriveSchedule() = default;
  static DriveSchedule constant(complex amplitude) { return DriveSchedule({{0.0, amplitude}}); }
  /// Segments sorted by t_start; amplitude before the first segment is zero.
  explicit DriveSchedule(std::vector<Segment> segments);

  complex at(double t) const;
  /// Segment start times strictly inside (t0, t1).
  std::vector<double> breakpoints(double t0, double t1) const;
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double max_abs() const;

 private:
  std::vector<Segment> segments_;
};

/// Physical parameters of a driven damped nonlinear resonator (rad/s and s).
struct SimConfig {
  double kappa = 1.0;
  /// omega_r0 - omega_d.
  double detuning = 0.0;
  NonlinearityModel nonlinearity;
  DriveSchedule drive;
  double n_b = 0.0;
  double t_final = 0.0;
  double dt_out = 0.0;
  /// Bare resonator frequency; needed only for temperatures and lab-frame runs.
  std::optional<double> omega_r0;
  /// Oracle truncation; 0 picks it from a hybrid pre-run.
  long fock_dim = 0;

  /// coth(omega_r0 / 2 T_b) = 1 + 2 n_b.
  double c_b() const { return 1.0 + 2.0 * n_b; }
  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
  /// 0, dt_out, 2 dt_out, ..., t_final (t_final always included).
  std::vector<double> sample_times() const;
};

/// Parameters left after the rescalings kappa -> 1, |eta| -> 1, T_b -> 0.
struct DimensionlessConfig {
  double eps_tilde = 0.0;
  /// -sign(eta) (omega_r0 - omega_d) / kappa.
  double delta_omega_tilde = 0.0;
  int sign_eta = -1;
};

/// Requires a Kerr model and a drive that is constant in magnitude; the
/// drive amplitude at t = 0 is used.
DimensionlessConfig rescale(const SimConfig& config);

/// Inverse map with kappa = 1, eta = sign_eta, real positive drive, n_b = 0.
SimConfig from_dimensionless(const DimensionlessConfig& d, double t_final = 0.0,
                             double dt_out = 0.0);

/// Photon number scale kappa / |eta| relating beta to its rescaled value.
double photon_scale(const SimConfig& config);

}  // namespace kerrsim
