#include "kerrsim/fock_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kerrsim/errors.hpp"

namespace kerrsim {
namespace {

// Shared pieces of the matrix element; s and d are (n+m)/2 - |beta|^2 and n - m.
struct ElementKernel {
  double norm;
  double inv_s;  // 1 / (2 W1 |beta|^2)
  double inv_d;  // 1 / (8 W2 |beta|^2)
  double phi;
  double shear;  // 2K / |beta|^2

  explicit ElementKernel(const FockGaussianParams& p) {
    const double n0 = p.beta_abs * p.beta_abs;
    norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * p.w1 * n0);
    inv_s = 1.0 / (2.0 * p.w1 * n0);
    inv_d = 1.0 / (8.0 * p.w2 * n0);
    phi = p.phi_beta;
    shear = 2.0 * p.k / n0;
  }

  complex operator()(double s, double d) const {
    const double mag = norm * std::exp(-s * s * inv_s - d * d * inv_d);
    return std::polar(mag, (phi - shear * s) * d);
  }
};

}  // namespace

void FockGaussianParams::validate(double tol) const {
  if (!(beta_abs > 0.0) || !std::isfinite(beta_abs)) {
    throw std::invalid_argument("FockGaussianParams: beta_abs must be positive");
  }
  if (!(w2 > 0.0) || w2 > w1 * (1.0 + tol) || !std::isfinite(w1) || !std::isfinite(k)) {
    throw std::invalid_argument("FockGaussianParams: need 0 < w2 <= w1 (w1=" + std::to_string(w1) +
                                ", w2=" + std::to_string(w2) + ")");
  }
}

complex density_element(const FockGaussianParams& params, long n, long m) {
  const double n0 = params.beta_abs * params.beta_abs;
  return ElementKernel(params)(0.5 * static_cast<double>(n + m) - n0, static_cast<double>(n - m));
}

FockWindow support_window(const FockGaussianParams& params, double sigmas) {
  const double n0 = params.beta_abs * params.beta_abs;
  const double width = sigmas * std::sqrt(params.w1) * params.beta_abs;
  return {std::max(0L, static_cast<long>(std::floor(n0 - width))),
          static_cast<long>(std::ceil(n0 + width))};
}

FockDensityMatrix density_matrix(const FockGaussianParams& params, long dim) {
  const ElementKernel kernel(params);
  const double n0 = params.beta_abs * params.beta_abs;
  const FockWindow w = support_window(params);
  const long hi = std::min(w.hi, dim - 1);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (long m = w.lo; m <= hi; ++m) {
    for (long n = w.lo; n <= hi; ++n) {
      rho(n, m) = kernel(0.5 * static_cast<double>(n + m) - n0, static_cast<double>(n - m));
    }
  }
  return FockDensityMatrix(std::move(rho));
}

Eigen::MatrixXcd apply_density(const FockGaussianParams& params, const Eigen::MatrixXcd& x) {
  const ElementKernel kernel(params);
  const double n0 = params.beta_abs * params.beta_abs;
  const long dim = x.rows();
  const FockWindow w = support_window(params);
  const long hi = std::min(w.hi, dim - 1);
  // Coherences decay as exp(-d^2 / (8 W2 |beta|^2)); 16 sigma of d covers 1e-28.
  const long band = static_cast<long>(std::ceil(16.0 * std::sqrt(params.w2) * params.beta_abs)) + 1;

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, x.cols());
  Eigen::VectorXcd row;
  for (long n = w.lo; n <= hi; ++n) {
    const long m_lo = std::max(w.lo, n - band);
    const long m_hi = std::min(hi, n + band);
    row.resize(m_hi - m_lo + 1);
    for (long m = m_lo; m <= m_hi; ++m) {
      row(m - m_lo) = kernel(0.5 * static_cast<double>(n + m) - n0, static_cast<double>(n - m));
    }
    out.row(n).noalias() = row.transpose() * x.middleRows(m_lo, row.size());
  }
  return out;
}

double density_trace(const FockGaussianParams& params) {
  const ElementKernel kernel(params);
  const double n0 = params.beta_abs * params.beta_abs;
  const FockWindow w = support_window(params);
  double tr = 0.0;
  for (long n = w.lo; n <= w.hi; ++n) tr += kernel(static_cast<double>(n) - n0, 0.0).real();
  return tr;
}

GaussianState to_phase_space(const FockGaussianParams& params) {
  const double w1 = params.w1;
  const double w2 = params.w2;
  const double k = params.k;
  const double d0 = (1.0 / w2 + w1 * (1.0 + 16.0 * k * k)) / 8.0;
  const double radicand = d0 * d0 - w1 / (16.0 * w2);
  if (radicand < -1e-12 * d0 * d0) {
    throw NonPhysicalMoments("to_phase_space: negative b^2 (" + std::to_string(radicand) + ")");
  }
  // b^2 = (K W1)^2 + (D0 - W1/4)^2 identically; hypot avoids the cancellation
  // in the radicand near b = 0.
  const double y = k * w1;
  const double x = d0 - 0.25 * w1;
  const double b = std::hypot(y, x);
  const double theta = 2.0 * params.phi_beta + std::atan2(y, x);
  return {std::polar(params.beta_abs, params.phi_beta), d0, std::min(b, d0), theta};
}

FockGaussianParams from_phase_space(const GaussianState& state) {
  const double r = std::abs(state.center());
  if (r == 0.0) throw DegenerateCenter("from_phase_space: state center is zero");
  const double phi = std::arg(state.center());
  const double rel = state.theta() - 2.0 * phi;
  const double d0 = state.d0();
  const double b = state.b();
  const double along = d0 - b * std::cos(rel);
  FockGaussianParams p;
  p.beta_abs = r;
  p.phi_beta = phi;
  p.w1 = 4.0 * along;
  p.w2 = along / (4.0 * (d0 - b) * (d0 + b));
  p.k = b * std::sin(rel) / (4.0 * along);
  return p;
}

complex corrected_center(const FockGaussianParams& p) {
  const double r = p.beta_abs;
  const double re = r - (p.w1 + 1.0 / p.w2 - 2.0) / (8.0 * r) - 2.0 * p.k * p.k * p.w1 / r;
  const double im = -p.k * p.w1 / r;
  return std::polar(1.0, p.phi_beta) * complex{re, im};
}

double thermal_photons(const FockGaussianParams& params) {
  return std::max(0.0, 0.5 * (std::sqrt(params.w1 / params.w2) - 1.0));
}

}  // namespace kerrsim
