#include "kerrsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "kerrsim/errors.hpp"
#include "kerrsim/fock_space.hpp"
#include "kerrsim/lindblad_oracle.hpp"

namespace kerrsim {
namespace {

constexpr double kPi = std::numbers::pi;

struct Support {
  Eigen::MatrixXcd vectors;  // columns scaled by sqrt(lambda)
};

Support sqrt_support(const Eigen::MatrixXcd& rho, const FidelityOptions& opt, const char* which) {
  const double scale = std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > opt.hermitian_tol * scale) {
    throw NonHermitianInput(std::string("fidelity: ") + which + " is not Hermitian");
  }
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (lam(0) < -opt.negative_tol) {
    throw NegativeSpectrum(std::string("fidelity: ") + which + " has eigenvalue " +
                           std::to_string(lam(0)));
  }
  const double cut = opt.support_tol * std::max(lam(lam.size() - 1), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cut && lam(i) > 0.0) keep.push_back(i);
  }
  Support s;
  s.vectors.resize(rho.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    s.vectors.col(static_cast<Eigen::Index>(j)) =
        std::sqrt(lam(keep[j])) * es.eigenvectors().col(keep[j]);
  }
  return s;
}

double sqrt_trace_psd(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    s += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  }
  return s;
}

void check_top_population(const Eigen::MatrixXcd& factor, const char* what) {
  const long levels = std::min<long>(5, factor.rows());
  const double top = factor.bottomRows(levels).squaredNorm();
  if (top > 1e-6) {
    throw TruncationOverflow(std::string(what) + ": top Fock levels hold " + std::to_string(top) +
                                 "; increase the dimension",
                             top);
  }
}

}  // namespace

double fidelity(const FockDensityMatrix& rho1, const FockDensityMatrix& rho2,
                const FidelityOptions& options) {
  if (rho1.dim() != rho2.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Support s1 = sqrt_support(rho1.data(), options, "rho1");
  const Support s2 = sqrt_support(rho2.data(), options, "rho2");
  if (s1.vectors.cols() == 0 || s2.vectors.cols() == 0) return 0.0;
  // Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) = sum of singular values of
  // sqrt(rho1) sqrt(rho2), reduced here to the two supports.
  const Eigen::MatrixXcd overlap = s1.vectors.adjoint() * s2.vectors;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(overlap);
  const double tr = svd.singularValues().sum();
  return tr * tr / (rho1.trace() * rho2.trace());
}

double fidelity_low_rank(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply_rho1,
                         double trace_rho1, const Eigen::MatrixXcd& factor) {
  const Eigen::MatrixXcd m = factor.adjoint() * apply_rho1(factor);
  const double tr = sqrt_trace_psd(m);
  return tr * tr / (trace_rho1 * factor.squaredNorm());
}

double fidelity_low_rank(const FockDensityMatrix& rho1, const Eigen::MatrixXcd& factor) {
  if (factor.rows() != rho1.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  return fidelity_low_rank([&](const Eigen::MatrixXcd& x) -> Eigen::MatrixXcd { return rho1.data() * x; },
                           rho1.trace(), factor);
}

double fidelity_pure(const Eigen::VectorXcd& psi, const FockDensityMatrix& rho) {
  if (psi.size() != rho.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const complex v = psi.dot(rho.data() * psi);
  return v.real() / (rho.trace() * psi.squaredNorm());
}

Eigen::MatrixXcd dsts_factor(complex center, const DstsShape& shape, long dim, double weight_cut) {
  if (dim < 1) throw std::invalid_argument("dsts_factor: empty basis");
  std::vector<double> weights;
  if (shape.n_th <= 0.0) {
    weights.push_back(1.0);
  } else {
    const double q = shape.n_th / (1.0 + shape.n_th);
    double p = 1.0 / (1.0 + shape.n_th);
    while (p > weight_cut && static_cast<long>(weights.size()) < dim) {
      weights.push_back(p);
      p *= q;
    }
  }
  const long k = static_cast<long>(weights.size());
  Eigen::MatrixXcd cols;
  if (k == 1) {
    // Pure state: closed-form amplitudes.
    cols = fock::displaced_squeezed_vacuum(center, shape.r, shape.theta, dim);
  } else {
    cols = Eigen::MatrixXcd::Zero(dim, k);
    for (long j = 0; j < k; ++j) cols(j, j) = std::sqrt(weights[j]);
    if (shape.r > 0.0) cols = fock::squeeze(std::polar(shape.r, shape.theta), cols);
    if (center != complex{0.0, 0.0}) cols = fock::displace(center, cols);
  }
  check_top_population(cols, "dsts_factor");
  return cols;
}

FockDensityMatrix dsts_density(complex center, const DstsShape& shape, long dim) {
  const Eigen::MatrixXcd l = dsts_factor(center, shape, dim);
  return FockDensityMatrix(l * l.adjoint());
}

Eigen::MatrixXcd gaussian_factor(const GaussianState& state, long dim) {
  return dsts_factor(state.center(), to_dsts(state), dim);
}

GaussianFit gaussian_fit(const FockDensityMatrix& rho) {
  const Moments m = moments(rho);
  GaussianFit fit{from_moments(m.mean_a, m.mean_a2, m.mean_n), 0.0};
  fit.fit_infidelity = gaussian_infidelity(rho, fit.state);
  return fit;
}

double gaussian_infidelity(const FockDensityMatrix& rho, const GaussianState& state) {
  return 1.0 - fidelity_low_rank(rho, gaussian_factor(state, rho.dim()));
}

double coherent_infidelity(const FockDensityMatrix& rho, complex center) {
  return 1.0 - fidelity_pure(fock::coherent_vector(center, rho.dim()), rho);
}

double wigner_numeric(const FockDensityMatrix& rho, complex alpha) {
  const long dim = rho.dim();
  if (std::norm(alpha) > static_cast<double>(dim - 10)) {
    throw TruncationOverflow("wigner_numeric: |alpha|^2 too close to the dimension",
                             std::norm(alpha));
  }
  // Only columns carrying weight contribute to Tr[D(-a) rho D(a) P].
  std::vector<long> support;
  const double cut = 1e-16 * rho.data().cwiseAbs().maxCoeff();
  for (long k = 0; k < dim; ++k) {
    if (rho.data().col(k).cwiseAbs().maxCoeff() > cut) support.push_back(k);
  }
  const long s = static_cast<long>(support.size());
  Eigen::MatrixXcd cols(dim, s);
  Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(dim, s);
  for (long j = 0; j < s; ++j) {
    cols.col(j) = rho.data().col(support[j]);
    unit(support[j], j) = 1.0;
  }
  const Eigen::MatrixXcd z = fock::displace(-alpha, cols);
  const Eigen::MatrixXcd v = fock::displace(-alpha, unit);
  complex total{0.0, 0.0};
  for (long n = 0; n < dim; ++n) {
    const complex row = (z.row(n).array() * v.row(n).array().conjugate()).sum();
    total += (n % 2 == 0 ? 1.0 : -1.0) * row;
  }
  return 2.0 / kPi * total.real();
}

double husimi_numeric(const FockDensityMatrix& rho, complex alpha) {
  const Eigen::VectorXcd psi = fock::coherent_vector(alpha, rho.dim());
  return psi.dot(rho.data() * psi).real() / kPi;
}

double husimi_numeric(const FockGaussianParams& params, complex alpha) {
  const long dim = support_window(params).hi + 1;
  const Eigen::MatrixXcd psi = fock::coherent_vector(alpha, dim);
  const Eigen::MatrixXcd rho_psi = apply_density(params, psi);
  return (psi.adjoint() * rho_psi)(0, 0).real() / kPi;
}

double conversion_infidelity_estimate(double d0, double b, double beta_abs) {
  const double u = 4.0 * (d0 + b);
  return 0.04 * u * u * u / (beta_abs * beta_abs);
}

double conversion_infidelity(const FockGaussianParams& params, bool use_corrected_center) {
  params.validate();
  GaussianState g = to_phase_space(params);
  if (use_corrected_center) g = g.with_center(corrected_center(params));
  const long dim = support_window(params, 10.0).hi + 40;
  const Eigen::MatrixXcd factor = gaussian_factor(g, dim);
  const double f = fidelity_low_rank(
      [&](const Eigen::MatrixXcd& x) { return apply_density(params, x); }, density_trace(params),
      factor);
  return 1.0 - f;
}

double short_axis_variance(const std::function<double(complex)>& wigner_at, complex center,
                           double theta, double half_width, int points) {
  const complex dir = std::polar(1.0, 0.5 * theta);
  std::vector<double> s_vals;
  std::vector<double> y_vals;
  for (int i = 0; i < points; ++i) {
    const double s = -half_width + 2.0 * half_width * i / (points - 1);
    const double w = wigner_at(center + s * dir);
    if (w > 0.0) {
      s_vals.push_back(s);
      y_vals.push_back(std::log(w));
    }
  }
  const auto n = static_cast<Eigen::Index>(s_vals.size());
  if (n < 3) throw std::invalid_argument("short_axis_variance: too few positive samples");
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = s_vals[i];
    a(i, 2) = s_vals[i] * s_vals[i];
    y(i) = y_vals[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  return -0.5 / c(2);
}

}  // namespace kerrsim
