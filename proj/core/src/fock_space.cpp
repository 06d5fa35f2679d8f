#include "kerrsim/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kerrsim::fock {
namespace {

constexpr double kBesselCut = 1e-18;

double gershgorin_bound(const SparseMatrix& g) {
  // Row sums; for the (anti-)Hermitian generators rows and columns agree.
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(g.cols());
  for (Eigen::Index j = 0; j < g.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(g, j); it; ++it) col_sums(j) += std::abs(it.value());
  }
  return g.cols() == 0 ? 0.0 : col_sums.maxCoeff();
}

Eigen::MatrixXcd padded(const Eigen::MatrixXcd& v, long pad) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(v.rows() + pad, v.cols());
  out.topRows(v.rows()) = v;
  return out;
}

}  // namespace

SparseMatrix lowering(long dim) {
  SparseMatrix a(dim, dim);
  a.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (long n = 1; n < dim; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  a.makeCompressed();
  return a;
}

SparseMatrix displacement_generator(complex alpha, long dim) {
  std::vector<Eigen::Triplet<complex>> t;
  t.reserve(2 * static_cast<std::size_t>(dim));
  for (long n = 1; n < dim; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    t.emplace_back(n, n - 1, alpha * s);             // alpha a^dag
    t.emplace_back(n - 1, n, -std::conj(alpha) * s);  // -alpha^* a
  }
  SparseMatrix g(dim, dim);
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

SparseMatrix squeeze_generator(complex xi, long dim) {
  std::vector<Eigen::Triplet<complex>> t;
  t.reserve(2 * static_cast<std::size_t>(dim));
  for (long n = 2; n < dim; ++n) {
    const double s = 0.5 * std::sqrt(static_cast<double>(n) * static_cast<double>(n - 1));
    t.emplace_back(n - 2, n, std::conj(xi) * s);  // xi^* a^2 / 2
    t.emplace_back(n, n - 2, -xi * s);            // -xi a^dag^2 / 2
  }
  SparseMatrix g(dim, dim);
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

Eigen::VectorXcd coherent_vector(complex alpha, long dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  const double r = std::abs(alpha);
  if (r == 0.0) {
    v(0) = 1.0;
    return v;
  }
  const double log_r = std::log(r);
  const double phase = std::arg(alpha);
  const double base = -0.5 * r * r;
  for (long n = 0; n < dim; ++n) {
    const double dn = static_cast<double>(n);
    const double log_mag = base + dn * log_r - 0.5 * std::lgamma(dn + 1.0);
    v(n) = std::polar(std::exp(log_mag), dn * phase);
  }
  return v;
}

Eigen::VectorXcd basis_vector(long dim, long n) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(n) = 1.0;
  return v;
}

std::vector<double> bessel_j_sequence(double x) {
  x = std::abs(x);
  if (x == 0.0) return {1.0};
  // J_k(x) is negligible once k exceeds x by a few x^{1/3}; start well above.
  const long start = static_cast<long>(x + 30.0 * std::cbrt(x) + 60.0);
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-280;
  for (long k = start; k >= 1; --k) {
    j[k - 1] = (2.0 * static_cast<double>(k) / x) * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e250) {
      for (long i = k - 1; i <= start; ++i) j[i] *= 1e-250;
    }
  }
  double norm = j[0];
  for (long k = 2; k <= start; k += 2) norm += 2.0 * j[k];
  for (double& v : j) v /= norm;
  long last = start;
  while (last > 0 && std::abs(j[last]) < kBesselCut) --last;
  j.resize(static_cast<std::size_t>(last) + 1);
  return j;
}

Eigen::MatrixXcd expm_action(const SparseMatrix& generator, const Eigen::MatrixXcd& v) {
  const double rho = gershgorin_bound(generator);
  if (rho == 0.0) return v;
  const std::vector<double> jk = bessel_j_sequence(rho);
  // exp(iH) = J_0 + 2 sum_k i^k J_k T_k(H / rho);  H / rho = -i G / rho.
  const complex scale{0.0, -1.0 / rho};
  Eigen::MatrixXcd t_prev = v;
  Eigen::MatrixXcd out = jk[0] * v;
  if (jk.size() == 1) return out;
  Eigen::MatrixXcd t_cur = scale * (generator * v);
  Eigen::MatrixXcd t_next(v.rows(), v.cols());
  const complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  out += (2.0 * jk[1]) * powers[1] * t_cur;
  for (std::size_t k = 2; k < jk.size(); ++k) {
    t_next.noalias() = generator * t_cur;
    t_next *= 2.0 * scale;
    t_next -= t_prev;
    out += (2.0 * jk[k]) * powers[k % 4] * t_next;
    std::swap(t_prev, t_cur);
    std::swap(t_cur, t_next);
  }
  return out;
}

Eigen::MatrixXcd displace(complex alpha, const Eigen::MatrixXcd& v, long pad) {
  const long dim = v.rows() + pad;
  return expm_action(displacement_generator(alpha, dim), padded(v, pad)).topRows(v.rows());
}

Eigen::MatrixXcd squeeze(complex xi, const Eigen::MatrixXcd& v, long pad) {
  const long dim = v.rows() + pad;
  return expm_action(squeeze_generator(xi, dim), padded(v, pad)).topRows(v.rows());
}

Eigen::VectorXcd displaced_squeezed_vacuum(complex alpha, double r, double theta, long dim) {
  // D S|0> is annihilated by (a - alpha) cosh r + (a^dag - alpha^*) e^{i theta} sinh r:
  //   sqrt(n+1) c_{n+1} = gamma c_n - e^{i theta} tanh(r) sqrt(n) c_{n-1},
  //   gamma = alpha + alpha^* e^{i theta} tanh(r).
  // Built unnormalized with running rescale; the recursion is stopped once
  // the amplitudes have decayed far below their maximum, where the growing
  // companion solution would otherwise take over.
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim);
  const complex et = std::polar(std::tanh(r), theta);
  const complex gamma = alpha + std::conj(alpha) * et;
  c(0) = 1.0;
  if (dim > 1) c(1) = gamma;
  double peak = std::max(1.0, std::abs(gamma));
  int small_run = 0;
  for (long n = 1; n + 1 < dim; ++n) {
    c(n + 1) = (gamma * c(n) - et * std::sqrt(static_cast<double>(n)) * c(n - 1)) /
               std::sqrt(static_cast<double>(n + 1));
    const double mag = std::abs(c(n + 1));
    if (mag > 1e200) {
      c.head(n + 2) *= 1e-200;
      peak *= 1e-200;
    }
    peak = std::max(peak, std::abs(c(n + 1)));
    small_run = std::abs(c(n + 1)) < 1e-20 * peak ? small_run + 1 : 0;
    if (small_run >= 3 && static_cast<double>(n) > std::norm(alpha)) {
      c.tail(dim - n - 2).setZero();
      break;
    }
  }
  c.normalize();
  return c;
}

}  // namespace kerrsim::fock
