#include "kerrsim/sim_config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrsim {

NonlinearityModel NonlinearityModel::kerr(double eta) {
  return NonlinearityModel([eta](double n) { return eta * n; }, [eta](double) { return eta; },
                           eta);
}

NonlinearityModel NonlinearityModel::custom(Fn shift, Fn slope) {
  if (!shift || !slope) throw std::invalid_argument("NonlinearityModel: empty function");
  return NonlinearityModel(std::move(shift), std::move(slope), std::nullopt);
}

DriveSchedule::DriveSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (!(segments_[i].t_start > segments_[i - 1].t_start)) {
      throw std::invalid_argument("DriveSchedule: segment start times must increase");
    }
  }
}

complex DriveSchedule::at(double t) const {
  complex value{0.0, 0.0};
  for (const Segment& s : segments_) {
    if (s.t_start <= t) value = s.amplitude;
    else break;
  }
  return value;
}

std::vector<double> DriveSchedule::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  for (const Segment& s : segments_) {
    if (s.t_start > t0 && s.t_start < t1) out.push_back(s.t_start);
  }
  return out;
}

double DriveSchedule::max_abs() const {
  double m = 0.0;
  for (const Segment& s : segments_) m = std::max(m, std::abs(s.amplitude));
  return m;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail("kappa", "must be positive");
  if (!std::isfinite(detuning)) fail("detuning", "must be finite");
  if (!(n_b >= 0.0) || !std::isfinite(n_b)) fail("n_b", "must be nonnegative");
  if (!(t_final >= 0.0)) fail("t_final", "must be nonnegative");
  if (!(dt_out >= 0.0)) fail("dt_out", "must be nonnegative");
  if (omega_r0 && !(*omega_r0 > 0.0)) fail("omega_r0", "must be positive");
  if (fock_dim < 0 || fock_dim == 1) fail("fock_dim", "must be 0 (auto) or at least 2");
}

std::vector<double> SimConfig::sample_times() const {
  std::vector<double> t{0.0};
  if (t_final <= 0.0) return t;
  if (dt_out <= 0.0) {
    t.push_back(t_final);
    return t;
  }
  const long n = static_cast<long>(std::floor(t_final / dt_out + 1e-9));
  for (long i = 1; i <= n; ++i) t.push_back(std::min(t_final, static_cast<double>(i) * dt_out));
  if (t.back() < t_final * (1.0 - 1e-12)) t.push_back(t_final);
  else t.back() = t_final;
  return t;
}

DimensionlessConfig rescale(const SimConfig& config) {
  const auto eta = config.nonlinearity.kerr_eta();
  if (!eta) throw std::invalid_argument("rescale: requires a Kerr nonlinearity");
  DimensionlessConfig d;
  d.sign_eta = *eta < 0.0 ? -1 : 1;
  const double k = config.kappa;
  d.eps_tilde = std::abs(config.drive.at(0.0)) * std::sqrt(std::abs(*eta)) / (k * std::sqrt(k));
  d.delta_omega_tilde = -static_cast<double>(d.sign_eta) * config.detuning / k;
  return d;
}

SimConfig from_dimensionless(const DimensionlessConfig& d, double t_final, double dt_out) {
  SimConfig c;
  c.kappa = 1.0;
  c.detuning = -static_cast<double>(d.sign_eta) * d.delta_omega_tilde;
  c.nonlinearity = NonlinearityModel::kerr(static_cast<double>(d.sign_eta));
  c.drive = DriveSchedule::constant(d.eps_tilde);
  c.n_b = 0.0;
  c.t_final = t_final;
  c.dt_out = dt_out;
  return c;
}

double photon_scale(const SimConfig& config) {
  const auto eta = config.nonlinearity.kerr_eta();
  if (!eta || *eta == 0.0) throw std::invalid_argument("photon_scale: requires eta != 0");
  return config.kappa / std::abs(*eta);
}

}  // namespace kerrsim
