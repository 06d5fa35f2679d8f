#include "kerrsim/hybrid_evolver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kerrsim/errors.hpp"

namespace kerrsim {
namespace {

// Regularized Re(eps / beta); the shift delta^2 stays far below integrator
// tolerance but keeps the vacuum start finite.
double re_eps_over_beta(complex eps, complex beta, double kappa) {
  const double delta = 1e-12 * std::sqrt(std::abs(eps) / kappa);
  return (eps * std::conj(beta)).real() / (std::norm(beta) + delta * delta);
}

HybridState rhs_with_drive(const HybridState& s, const SimConfig& c, complex eps, bool frozen) {
  const double n = std::norm(s.beta);
  const double omega = c.detuning + c.nonlinearity.shift(n);
  HybridState d;
  d.beta = complex{0.0, -omega} * s.beta - 0.5 * c.kappa * s.beta - complex{0.0, 1.0} * eps;
  if (frozen) {
    d.w1 = d.w2 = d.k = 0.0;
    return d;
  }
  const double r = re_eps_over_beta(eps, s.beta, c.kappa);
  const double cb = c.c_b();
  const double shear = 1.0 + 16.0 * s.k * s.k;
  d.w1 = 8.0 * s.k * s.w1 * r + c.kappa * (cb - s.w1);
  d.w2 = 8.0 * s.k * s.w2 * r + c.kappa * s.w2 * (1.0 - s.w2 * shear * cb);
  d.k = (1.0 / (4.0 * s.w1 * s.w2) - 0.25 * shear) * r - c.kappa * s.k * cb / s.w1 +
        0.5 * n * c.nonlinearity.slope(n);
  return d;
}

PhaseShapeState phase_rhs_with_drive(complex beta, const PhaseShapeState& s, const SimConfig& c,
                                     complex eps) {
  const double n = std::norm(beta);
  const double g = 2.0 * c.nonlinearity.slope(n) * n;
  const double sn = std::sin(s.delta_theta);
  PhaseShapeState d;
  d.d0 = -c.kappa * s.d0 + 0.25 * c.kappa * c.c_b() + g * s.b * sn;
  d.b = -c.kappa * s.b + g * s.d0 * sn;
  d.delta_theta = 2.0 * re_eps_over_beta(eps, beta, c.kappa) -
                  g * (s.b - s.d0 * std::cos(s.delta_theta)) / std::max(s.b, 1e-14);
  return d;
}

Eigen::VectorXd pack(const HybridState& s) {
  Eigen::VectorXd y(5);
  y << s.beta.real(), s.beta.imag(), s.w1, s.w2, s.k;
  return y;
}

HybridState unpack(const Eigen::VectorXd& y) {
  return {complex{y(0), y(1)}, y(2), y(3), y(4)};
}

// Runs `integrate_segment(t0, t1, eps, y, outputs)` over drive segments so
// the right-hand side never sees a discontinuity inside a step.
template <class Segment>
void over_drive_segments(const SimConfig& config, std::span<const double> times,
                         Segment&& integrate_segment) {
  if (times.empty()) return;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("sample times must increase");
  }
  if (times.front() < 0.0) throw std::invalid_argument("sample times must be nonnegative");
  const double t_end = times.back();
  std::vector<double> edges{0.0};
  for (double b : config.drive.breakpoints(0.0, t_end)) edges.push_back(b);
  edges.push_back(t_end);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    if (b <= a) continue;
    const complex eps = config.drive.at(0.5 * (a + b));
    const auto lo = std::upper_bound(times.begin(), times.end(), a);
    const auto hi = std::upper_bound(times.begin(), times.end(), b);
    integrate_segment(a, b, eps, times.subspan(lo - times.begin(), hi - lo));
  }
}

template <class Vec, class Rhs, class Observer>
ode::Stats integrate(Rhs&& rhs, double a, double b, Vec& y, std::span<const double> outs,
                     Observer&& observe, const EvolveOptions& opt) {
  if (opt.fixed_step) return ode::rk4(rhs, a, b, y, outs, observe, *opt.fixed_step);
  ode::Options o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  return ode::dopri5(rhs, a, b, y, outs, observe, o);
}

void check_physical(const HybridState& s, double t) {
  const double tol = 1e-10 * std::max(1.0, s.w1);
  if (!(s.w2 > 0.0) || s.w2 > s.w1 + tol || !(s.w1 > 0.0)) {
    throw PhysicsError("hybrid state left 0 < W2 <= W1 at t = " + std::to_string(t) +
                       " (W1=" + std::to_string(s.w1) + ", W2=" + std::to_string(s.w2) + ")");
  }
}

}  // namespace

HybridState HybridState::thermal(double n_b, complex beta) {
  const double cb = 1.0 + 2.0 * n_b;
  return {beta, cb, 1.0 / cb, 0.0};
}

HybridState HybridState::from_gaussian(const GaussianState& state) {
  const FockGaussianParams p = from_phase_space(state);
  return {state.center(), p.w1, p.w2, p.k};
}

FockGaussianParams HybridState::params() const {
  FockGaussianParams p;
  p.beta_abs = std::abs(beta);
  p.phi_beta = std::arg(beta);
  p.w1 = w1;
  p.w2 = w2;
  p.k = k;
  return p;
}

GaussianState HybridState::gaussian() const {
  FockGaussianParams p = params();
  // The center is carried separately; only the shape needs |beta| > 0.
  if (p.beta_abs == 0.0) p.beta_abs = 1.0;
  return to_phase_space(p).with_center(beta);
}

HybridState hybrid_rhs(double t, const HybridState& state, const SimConfig& config) {
  return rhs_with_drive(state, config, config.drive.at(t), false);
}

PhaseShapeState phase_rhs(double t, complex beta, const PhaseShapeState& shape,
                          const SimConfig& config) {
  return phase_rhs_with_drive(beta, shape, config, config.drive.at(t));
}

LabFrameState linear_lab_frame_rhs(double t, const LabFrameState& s, const SimConfig& c) {
  if (!c.omega_r0) throw std::invalid_argument("linear_lab_frame_rhs: omega_r0 required");
  const double w = *c.omega_r0;
  const double wd = w - c.detuning;
  const complex force = c.drive.at(t) * std::polar(1.0, -wd * t);
  LabFrameState d;
  d.x_c = w * s.p_c;
  d.p_c = -w * s.x_c - c.kappa * s.p_c - 2.0 * force.real();
  d.d_x = 2.0 * w * s.d_xp;
  d.d_p = -2.0 * w * s.d_xp - 2.0 * c.kappa * s.d_p + 0.5 * c.kappa * c.c_b();
  d.d_xp = -w * (s.d_x - s.d_p) - c.kappa * s.d_xp;
  return d;
}

HybridTrajectory evolve(const HybridState& initial, const SimConfig& config,
                        std::span<const double> sample_times, const EvolveOptions& options) {
  HybridTrajectory traj;
  traj.samples.reserve(sample_times.size());
  auto record = [&](double t, const Eigen::VectorXd& y) {
    const HybridState s = unpack(y);
    if (options.check_physicality) check_physical(s, t);
    traj.samples.push_back({t, s, s.gaussian()});
  };
  Eigen::VectorXd y = pack(initial);
  if (!sample_times.empty() && sample_times.front() == 0.0) record(0.0, y);

  over_drive_segments(config, sample_times, [&](double a, double b, complex eps,
                                                std::span<const double> outs) {
    auto rhs = [&](double, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
      dy = pack(rhs_with_drive(unpack(yy), config, eps, options.freeze_shape));
    };
    traj.stats += integrate(rhs, a, b, y, outs, record, options);
  });
  return traj;
}

GaussianState PhaseSample::gaussian() const {
  return {beta, shape.d0, shape.b, shape.delta_theta + 2.0 * std::arg(beta)};
}

std::vector<PhaseSample> evolve_phase_form(complex beta0, const PhaseShapeState& shape0,
                                           const SimConfig& config,
                                           std::span<const double> sample_times,
                                           const EvolveOptions& options) {
  std::vector<PhaseSample> out;
  auto record = [&](double t, const Eigen::VectorXd& y) {
    out.push_back({t, complex{y(0), y(1)}, {y(2), y(3), y(4)}});
  };
  Eigen::VectorXd y(5);
  y << beta0.real(), beta0.imag(), shape0.d0, shape0.b, shape0.delta_theta;
  if (!sample_times.empty() && sample_times.front() == 0.0) record(0.0, y);

  over_drive_segments(config, sample_times, [&](double a, double b, complex eps,
                                                std::span<const double> outs) {
    auto rhs = [&](double, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
      const complex beta{yy(0), yy(1)};
      const double n = std::norm(beta);
      const double omega = config.detuning + config.nonlinearity.shift(n);
      const complex db =
          complex{0.0, -omega} * beta - 0.5 * config.kappa * beta - complex{0.0, 1.0} * eps;
      const PhaseShapeState ds = phase_rhs_with_drive(beta, {yy(2), yy(3), yy(4)}, config, eps);
      dy.resize(5);
      dy << db.real(), db.imag(), ds.d0, ds.b, ds.delta_theta;
    };
    integrate(rhs, a, b, y, outs, record, options);
  });
  return out;
}

std::vector<LabFrameSample> evolve_lab_frame(const LabFrameState& initial, const SimConfig& config,
                                             std::span<const double> sample_times,
                                             const EvolveOptions& options) {
  std::vector<LabFrameSample> out;
  auto unpack_lab = [](const Eigen::VectorXd& y) {
    return LabFrameState{y(0), y(1), y(2), y(3), y(4)};
  };
  auto record = [&](double t, const Eigen::VectorXd& y) { out.push_back({t, unpack_lab(y)}); };
  Eigen::VectorXd y(5);
  y << initial.x_c, initial.p_c, initial.d_x, initial.d_p, initial.d_xp;
  if (!sample_times.empty() && sample_times.front() == 0.0) record(0.0, y);

  over_drive_segments(config, sample_times, [&](double a, double b, complex eps,
                                                std::span<const double> outs) {
    SimConfig seg = config;
    seg.drive = DriveSchedule::constant(eps);
    auto rhs = [&](double t, const Eigen::VectorXd& yy, Eigen::VectorXd& dy) {
      const LabFrameState d = linear_lab_frame_rhs(t, unpack_lab(yy), seg);
      dy.resize(5);
      dy << d.x_c, d.p_c, d.d_x, d.d_p, d.d_xp;
    };
    integrate(rhs, a, b, y, outs, record, options);
  });
  return out;
}

HybridState scale_temperature(const HybridState& state, double n_b) {
  const double cb = 1.0 + 2.0 * n_b;
  return {state.beta, state.w1 * cb, state.w2 / cb, state.k};
}

TrajectoryPeaks trajectory_peaks(const HybridTrajectory& trajectory) {
  TrajectoryPeaks p;
  for (const HybridSample& s : trajectory.samples) {
    p.n_peak = std::max(p.n_peak, std::norm(s.state.beta));
    p.w1_max = std::max(p.w1_max, s.state.w1);
  }
  return p;
}

}  // namespace kerrsim
