#include "kerrsim/fock_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kerrsim {

FockDensityMatrix::FockDensityMatrix(Eigen::MatrixXcd data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) throw std::invalid_argument("FockDensityMatrix: not square");
}

FockDensityMatrix FockDensityMatrix::fock_state(long dim, long n) {
  if (n < 0 || n >= dim) throw std::out_of_range("fock_state: level outside basis");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m(n, n) = 1.0;
  return FockDensityMatrix(std::move(m));
}

FockDensityMatrix FockDensityMatrix::thermal(long dim, double n_th) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  if (n_th <= 0.0) {
    m(0, 0) = 1.0;
  } else {
    const double q = n_th / (1.0 + n_th);
    double p = 1.0 / (1.0 + n_th);
    for (long k = 0; k < dim; ++k, p *= q) m(k, k) = p;
  }
  return FockDensityMatrix(std::move(m));
}

double FockDensityMatrix::top_population(long levels) const {
  const long n = std::min(levels, dim());
  return data_.diagonal().real().tail(n).sum();
}

double FockDensityMatrix::hermiticity_error() const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
}

void FockDensityMatrix::hermitize() {
  const long n = dim();
  for (long j = 0; j < n; ++j) {
    data_(j, j) = data_(j, j).real();
    for (long i = j + 1; i < n; ++i) {
      const std::complex<double> v = 0.5 * (data_(i, j) + std::conj(data_(j, i)));
      data_(i, j) = v;
      data_(j, i) = std::conj(v);
    }
  }
}

}  // namespace kerrsim
