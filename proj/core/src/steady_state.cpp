#include "kerrsim/steady_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kerrsim/errors.hpp"

namespace kerrsim {
namespace {

constexpr double kPi = std::numbers::pi;

// Monic cubic x^3 + b x^2 + c x + d.
struct Cubic {
  double b, c, d;
  double operator()(double x) const { return ((x + b) * x + c) * x + d; }
  double derivative(double x) const { return (3.0 * x + 2.0 * b) * x + c; }
  double discriminant() const {
    return 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c -
           27.0 * d * d;
  }
};

double polish(const Cubic& f, double x) {
  for (int i = 0; i < 2; ++i) {
    const double df = f.derivative(x);
    if (std::abs(df) < 1e-300) break;
    const double step = f(x) / df;
    if (!std::isfinite(step)) break;
    x -= step;
  }
  return x;
}

// Real roots in increasing order: three when the discriminant is positive.
std::vector<double> real_roots(const Cubic& f) {
  const double shift = f.b / 3.0;
  const double p = f.c - f.b * f.b / 3.0;
  const double q = 2.0 * f.b * f.b * f.b / 27.0 - f.b * f.c / 3.0 + f.d;
  std::vector<double> t;
  if (f.discriminant() > 0.0 && p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) t.push_back(m * std::cos(phi - 2.0 * kPi * k / 3.0));
  } else if (p < 0.0) {
    const double m = std::sqrt(-p / 3.0);
    const double arg = std::max(1.0, -1.5 * std::abs(q) / (p * m));
    t.push_back(-2.0 * std::copysign(1.0, q) * m * std::cosh(std::acosh(arg) / 3.0));
  } else if (p > 0.0) {
    const double m = std::sqrt(p / 3.0);
    t.push_back(-2.0 * m * std::sinh(std::asinh(1.5 * q / (p * m)) / 3.0));
  } else {
    t.push_back(std::cbrt(-q));
  }
  std::vector<double> x;
  for (double ti : t) x.push_back(polish(f, ti - shift));
  std::sort(x.begin(), x.end());
  return x;
}

Cubic steady_cubic(double eps_tilde, double dw) {
  return {-2.0 * dw, dw * dw + 0.25, -eps_tilde * eps_tilde};
}

double kerr_eta(const SimConfig& config, const char* who) {
  const auto eta = config.nonlinearity.kerr_eta();
  if (!eta) throw std::invalid_argument(std::string(who) + ": requires a Kerr nonlinearity");
  return *eta;
}

complex steady_drive(const SimConfig& config) {
  const auto& segs = config.drive.segments();
  return segs.empty() ? complex{0.0, 0.0} : segs.back().amplitude;
}

}  // namespace

std::string_view to_string(BranchLabel label) {
  switch (label) {
    case BranchLabel::single: return "single";
    case BranchLabel::lower: return "lower";
    case BranchLabel::middle: return "middle";
    case BranchLabel::upper: return "upper";
  }
  return "single";
}

double cubic_discriminant(double eps_tilde, double delta_omega_tilde) {
  return steady_cubic(eps_tilde, delta_omega_tilde).discriminant();
}

std::vector<SteadyBranch> steady_centers(double eps_tilde, double delta_omega_tilde,
                                         int sign_eta) {
  if (eps_tilde < 0.0) throw std::invalid_argument("steady_centers: eps_tilde must be >= 0");
  if (eps_tilde == 0.0) return {SteadyBranch{}};
  const Cubic f = steady_cubic(eps_tilde, delta_omega_tilde);
  const std::vector<double> roots = real_roots(f);
  std::vector<SteadyBranch> out;
  const double s = sign_eta < 0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    SteadyBranch br;
    br.n_tilde = std::max(0.0, roots[i]);
    br.beta = complex{0.0, -eps_tilde} / complex{0.5, s * (br.n_tilde - delta_omega_tilde)};
    if (roots.size() == 3) {
      br.label = std::array{BranchLabel::lower, BranchLabel::middle, BranchLabel::upper}[i];
    }
    out.push_back(br);
  }
  return out;
}

std::vector<SteadyBranch> steady_centers(const SimConfig& config) {
  const double eta = kerr_eta(config, "steady_centers");
  const complex eps = steady_drive(config);
  if (eta == 0.0) {
    SteadyBranch br;
    br.beta = complex{0.0, -1.0} * eps / complex{0.5 * config.kappa, config.detuning};
    return {br};
  }
  SimConfig c = config;
  c.drive = DriveSchedule::constant(eps);
  const DimensionlessConfig d = rescale(c);
  const double scale = std::sqrt(photon_scale(config));
  const complex phase = std::abs(eps) > 0.0 ? eps / std::abs(eps) : complex{1.0, 0.0};
  std::vector<SteadyBranch> out = steady_centers(d.eps_tilde, d.delta_omega_tilde, d.sign_eta);
  for (SteadyBranch& br : out) br.beta *= scale * phase;
  return out;
}

std::optional<BistabilityBounds> bistability_bounds(double dw) {
  const double disc = dw * dw - 0.75;
  if (dw <= 0.0 || disc <= 0.0) return std::nullopt;
  const double n_plus = (2.0 * dw + std::sqrt(disc)) / 3.0;
  const double n_minus = (2.0 * dw - std::sqrt(disc)) / 3.0;
  auto eps_at = [dw](double n) { return std::sqrt(n * (n - dw) * (n - dw) + 0.25 * n); };
  // Merging at n_plus gives the lower drive edge, at n_minus the upper one.
  return BistabilityBounds{eps_at(n_plus), eps_at(n_minus), n_plus, n_minus};
}

bool is_critical_point(double eps_tilde, double delta_omega_tilde, double tol) {
  return std::abs(eps_tilde - std::pow(3.0, -0.75)) <= tol &&
         std::abs(delta_omega_tilde - std::sqrt(3.0) / 2.0) <= tol;
}

SteadyShape steady_shape(complex beta, const SimConfig& config) {
  const complex eps = steady_drive(config);
  const double n = std::norm(beta);
  const double eta_b = config.nonlinearity.slope(n);
  const double kappa = config.kappa;
  const double cb = config.c_b();
  const double r = n > 0.0 ? (eps / beta).real() : 0.0;
  const double x = eta_b * n - r;
  const double sgn = eta_b < 0.0 ? -1.0 : 1.0;
  SteadyShape out;
  out.delta_theta = std::atan2(sgn * 0.5 * kappa, sgn * x);
  const double ratio = 2.0 * eta_b * n * std::sin(out.delta_theta) / kappa;
  if (ratio >= 1.0) {
    throw InstabilityBound("steady_shape: 2 eta |beta|^2 sin(dtheta) / kappa = " +
                           std::to_string(ratio) + " >= 1");
  }
  const double denom = 1.0 - ratio * ratio;
  const double d0 = 0.25 * cb / denom;
  const double b = 0.25 * cb * std::max(ratio, 0.0) / denom;
  out.state = GaussianState(beta, d0, b, out.delta_theta + 2.0 * std::arg(beta));
  out.squeeze_factor = out.state.squeeze_factor();
  out.unsqueeze_factor = out.state.unsqueeze_factor();
  return out;
}

ThreeDbReport three_db_bound_check(const ThreeDbSweep& sweep) {
  ThreeDbReport rep;
  for (double n_b : sweep.n_b_values) {
    for (int i = 0; i < sweep.eps_points; ++i) {
      const double eps = sweep.eps_max * (i + 1) / sweep.eps_points;
      for (int j = 0; j < sweep.dw_points; ++j) {
        const double dw = sweep.dw_points == 1
                              ? sweep.dw_min
                              : sweep.dw_min + (sweep.dw_max - sweep.dw_min) * j /
                                                   (sweep.dw_points - 1);
        SimConfig c = from_dimensionless({eps, dw, -1});
        c.n_b = n_b;
        ++rep.points;
        for (const SteadyBranch& br : steady_centers(c)) {
          try {
            const SteadyShape sh = steady_shape(br.beta, c);
            ++rep.branches;
            rep.max_squeeze = std::max(rep.max_squeeze, sh.squeeze_factor);
            rep.min_scaled_min_variance =
                std::min(rep.min_scaled_min_variance, 4.0 * sh.state.min_variance() / c.c_b());
          } catch (const InstabilityBound&) {
            ++rep.instability_skipped;
          }
        }
      }
    }
  }
  return rep;
}

DrummondMoments drummond_moments(complex beta, const SimConfig& config) {
  const double eta = kerr_eta(config, "drummond_moments");
  const double n = std::norm(beta);
  const double cb = config.c_b();
  const double shifted = config.detuning + 2.0 * eta * n;
  const double lambda =
      shifted * shifted + 0.25 * config.kappa * config.kappa - eta * eta * n * n;
  DrummondMoments m;
  m.mean_a = beta;
  m.mean_a2 = beta * beta -
              eta * beta * beta * complex{shifted, 0.5 * config.kappa} * cb / (2.0 * lambda);
  m.mean_n = n + eta * eta * n * n * cb / (2.0 * lambda) + config.n_b;
  return m;
}

GaussianState drummond_state(complex beta, const SimConfig& config) {
  const DrummondMoments m = drummond_moments(beta, config);
  return from_moments(m.mean_a, m.mean_a2, m.mean_n);
}

std::vector<DykmanResult> dykman_limit(double beta_param, double n_b) {
  if (beta_param == 0.0) throw std::invalid_argument("dykman_limit: beta_param must be nonzero");
  auto finish = [n_b](DykmanResult r, double q2) {
    r.xi = 0.25 * std::log((3.0 * q2 - 1.0) / (q2 - 1.0));
    const double sh = std::sinh(std::abs(r.xi));
    r.n_th = n_b + (2.0 * n_b + 1.0) * sh * sh;
    return r;
  };
  std::vector<DykmanResult> out;
  if (beta_param < 0.0) {
    // Q = i q with q (q^2 + 1) = -sqrt(|beta_param|); Q^2 = -q^2.
    const double c = std::sqrt(-beta_param);
    const std::vector<double> roots = real_roots({0.0, 1.0, -c});
    const double q = -roots.back();
    DykmanResult r;
    r.q = {0.0, q};
    out.push_back(finish(r, -q * q));
    return out;
  }
  const double c = std::sqrt(beta_param);
  const std::vector<double> roots = real_roots({0.0, -1.0, -c});
  if (roots.size() == 3) {
    DykmanResult lower;
    lower.label = BranchLabel::lower;
    lower.q = roots[1];
    lower.branch_ambiguous = true;
    out.push_back(finish(lower, roots[1] * roots[1]));
    DykmanResult upper;
    upper.label = BranchLabel::upper;
    upper.q = roots[2];
    upper.branch_ambiguous = true;
    out.push_back(finish(upper, roots[2] * roots[2]));
  } else {
    DykmanResult r;
    r.q = roots.back();
    out.push_back(finish(r, roots.back() * roots.back()));
  }
  return out;
}

}  // namespace kerrsim
