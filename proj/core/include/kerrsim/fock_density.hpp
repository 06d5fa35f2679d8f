#pragma once

#include <Eigen/Dense>

namespace kerrsim {

/// Density matrix in a truncated Fock basis {|0>, ..., |N-1>}.
class FockDensityMatrix {
 public:
  FockDensityMatrix() = default;
  explicit FockDensityMatrix(Eigen::MatrixXcd data);

  static FockDensityMatrix fock_state(long dim, long n);
  /// Geometric populations with mean n_th.
  static FockDensityMatrix thermal(long dim, double n_th);

  long dim() const noexcept { return static_cast<long>(data_.rows()); }
  const Eigen::MatrixXcd& data() const noexcept { return data_; }
  Eigen::MatrixXcd& data() noexcept { return data_; }

  std::complex<double> operator()(long n, long m) const { return data_(n, m); }

  double trace() const { return data_.diagonal().real().sum(); }
  /// Total population of the top `levels` Fock states.
  double top_population(long levels = 5) const;
  /// max |rho - rho^dag|.
  double hermiticity_error() const;
  /// rho <- (rho + rho^dag) / 2.
  void hermitize();

 private:
  Eigen::MatrixXcd data_;
};

}  // namespace kerrsim
