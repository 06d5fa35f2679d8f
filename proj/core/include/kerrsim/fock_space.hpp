#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace kerrsim::fock {

using complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<complex>;

/// Truncated lowering operator, <k|a|n> = sqrt(n) delta_{k, n-1}.
SparseMatrix lowering(long dim);

/// alpha a^dag - alpha^* a, the generator of D(alpha).
SparseMatrix displacement_generator(complex alpha, long dim);

/// (xi^* a^2 - xi a^dag^2) / 2, the generator of S(xi).
SparseMatrix squeeze_generator(complex xi, long dim);

/// Normalized coherent state |alpha>, amplitudes evaluated in log space so
/// large |alpha| does not overflow.
Eigen::VectorXcd coherent_vector(complex alpha, long dim);

Eigen::VectorXcd basis_vector(long dim, long n);

/// J_0(x) ... J_kmax(x), truncated where terms drop below 1e-18.
/// Miller backward recurrence normalized by J_0 + 2 sum J_2k = 1.
std::vector<double> bessel_j_sequence(double x);

/// exp(G) V for anti-Hermitian sparse G, by Chebyshev expansion of exp(iH),
/// H = -iG. The spectral radius is bounded by Gershgorin row sums.
Eigen::MatrixXcd expm_action(const SparseMatrix& generator, const Eigen::MatrixXcd& v);

/// D(alpha) V and S(xi) V. V is padded by `pad` zero rows before the
/// exponential is applied and the result truncated back, so the artificial
/// boundary of the truncated generator does not reflect into the result.
Eigen::MatrixXcd displace(complex alpha, const Eigen::MatrixXcd& v, long pad = 20);
Eigen::MatrixXcd squeeze(complex xi, const Eigen::MatrixXcd& v, long pad = 20);

/// Displaced squeezed vacuum D(alpha) S(xi)|0>, xi = r e^{i theta}, from the
/// three-term recursion of its Fock amplitudes. Independent of expm_action.
Eigen::VectorXcd displaced_squeezed_vacuum(complex alpha, double r, double theta, long dim);

}  // namespace kerrsim::fock
