#include "kerrsim/lindblad_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kerrsim/errors.hpp"
#include "kerrsim/hybrid_evolver.hpp"

namespace kerrsim {

LindbladGenerator build_generator(const SimConfig& config, long dim, double t) {
  if (dim < 2) throw std::invalid_argument("build_generator: need N >= 2");
  LindbladGenerator g;
  g.energies.resize(dim);
  double e = 0.0;
  for (long n = 0; n < dim; ++n) {
    g.energies(n) = e;
    e += config.detuning + config.nonlinearity.shift(static_cast<double>(n));
  }
  g.eps = config.drive.at(t);
  g.rate_down = config.kappa * (config.n_b + 1.0);
  g.rate_up = config.kappa * config.n_b;
  return g;
}

Eigen::MatrixXcd LindbladGenerator::hamiltonian() const {
  const long n = dim();
  Eigen::MatrixXcd h = energies.cast<complex>().asDiagonal();
  for (long k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    h(k, k - 1) += eps * s;             // eps a^dag
    h(k - 1, k) += std::conj(eps) * s;  // eps^* a
  }
  return h;
}

Eigen::MatrixXcd LindbladGenerator::liouvillian() const {
  // Column stacking: vec(A X B) = (B^T kron A) vec(X).
  const long n = dim();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (long k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd h = hamiltonian();
  auto kron = [n](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    Eigen::MatrixXcd k(n * n, n * n);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = x(i, j) * y;
    }
    return k;
  };
  auto dissipator = [&](const Eigen::MatrixXcd& l) {
    const Eigen::MatrixXcd ll = l.adjoint() * l;
    return (kron(l.conjugate(), l) - 0.5 * kron(id, ll) - 0.5 * kron(ll.transpose(), id)).eval();
  };
  const complex i1{0.0, 1.0};
  return -i1 * (kron(id, h) - kron(h.transpose(), id)) + rate_down * dissipator(a) +
         rate_up * dissipator(ad);
}

void lindblad_rhs(const LindbladGenerator& gen, const Eigen::MatrixXcd& rho,
                  Eigen::MatrixXcd& out) {
  const long dim = gen.dim();
  out.resize(dim, dim);
  thread_local std::vector<double> sq;
  thread_local std::vector<double> anti;
  if (static_cast<long>(sq.size()) != dim + 1) {
    sq.resize(dim + 1);
    anti.resize(dim);
    for (long k = 0; k <= dim; ++k) sq[k] = std::sqrt(static_cast<double>(k));
  }
  // Truncated a a^dag has a zero in its last diagonal entry, which keeps the
  // trace exactly conserved.
  for (long k = 0; k < dim; ++k) anti[k] = k + 1 < dim ? static_cast<double>(k + 1) : 0.0;

  const complex eps = gen.eps;
  const complex eps_c = std::conj(eps);
  const double gd = gen.rate_down;
  const double gu = gen.rate_up;
  const complex* r = rho.data();
  complex* o = out.data();
  const double* e = gen.energies.data();
  auto at = [&](long n, long m) { return r[n + m * dim]; };

  for (long m = 0; m < dim; ++m) {
    for (long n = 0; n <= m; ++n) {
      const complex rnm = at(n, m);
      // rho H - H rho
      complex comm = (e[m] - e[n]) * rnm;
      if (m + 1 < dim) comm += eps * sq[m + 1] * at(n, m + 1);
      if (m > 0) comm += eps_c * sq[m] * at(n, m - 1);
      if (n > 0) comm -= eps * sq[n] * at(n - 1, m);
      if (n + 1 < dim) comm -= eps_c * sq[n + 1] * at(n + 1, m);
      complex v{-comm.imag(), comm.real()};  // i (rho H - H rho)
      double loss = 0.5 * static_cast<double>(n + m) * gd;
      if (m + 1 < dim) v += gd * sq[n + 1] * sq[m + 1] * at(n + 1, m + 1);
      if (gu != 0.0) {
        loss += 0.5 * (anti[n] + anti[m]) * gu;
        if (n > 0) v += gu * sq[n] * sq[m] * at(n - 1, m - 1);
      }
      v -= loss * rnm;
      if (n == m) {
        o[n + m * dim] = v.real();
      } else {
        o[n + m * dim] = v;
        o[m + n * dim] = std::conj(v);
      }
    }
  }
}

Moments moments(const FockDensityMatrix& rho) {
  const Eigen::MatrixXcd& d = rho.data();
  const long dim = rho.dim();
  Moments m;
  double tr = 0.0;
  for (long n = 0; n < dim; ++n) {
    const double dn = static_cast<double>(n);
    tr += d(n, n).real();
    m.mean_n += dn * d(n, n).real();
    if (n >= 1) m.mean_a += std::sqrt(dn) * d(n, n - 1);
    if (n >= 2) m.mean_a2 += std::sqrt(dn * (dn - 1.0)) * d(n, n - 2);
  }
  m.mean_a /= tr;
  m.mean_a2 /= tr;
  m.mean_n /= tr;
  return m;
}

OracleReport evolve_oracle(const FockDensityMatrix& rho0, const SimConfig& config,
                           std::span<const double> sample_times, const OracleObserver& observe,
                           const OracleOptions& options) {
  OracleReport report;
  const long dim = rho0.dim();
  if (dim < 2) throw std::invalid_argument("evolve_oracle: need N >= 2");
  for (std::size_t i = 1; i < sample_times.size(); ++i) {
    if (!(sample_times[i] > sample_times[i - 1])) {
      throw std::invalid_argument("evolve_oracle: sample times must increase");
    }
  }
  FockDensityMatrix scratch;
  bool warned = false;
  auto record = [&](double t, const Eigen::MatrixXcd& y) {
    scratch.data() = y;
    const double top = scratch.data()(dim - 1, dim - 1).real();
    const double top5 = scratch.top_population(5);
    report.max_top_population = std::max(report.max_top_population, top5);
    report.max_trace_deficit = std::max(report.max_trace_deficit, std::abs(scratch.trace() - 1.0));
    if (top > options.overflow_threshold) {
      throw TruncationOverflow("oracle: top Fock level population " + std::to_string(top) +
                                   " at t = " + std::to_string(t) + "; increase the dimension",
                               top);
    }
    if (top5 > options.warn_threshold && !warned) {
      report.warnings.push_back("top-5 Fock population " + std::to_string(top5) +
                                " exceeds " + std::to_string(options.warn_threshold) +
                                " at t = " + std::to_string(t));
      warned = true;
    }
    observe(t, scratch);
  };

  Eigen::MatrixXcd y = rho0.data();
  if (!sample_times.empty() && sample_times.front() == 0.0) record(0.0, y);
  if (sample_times.empty()) return report;

  auto hook = [](double, Eigen::MatrixXcd& rho) {
    const double err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (err == 0.0) return false;
    rho = (0.5 * (rho + rho.adjoint())).eval();
    return true;
  };

  const double t_end = sample_times.back();
  std::vector<double> edges{0.0};
  for (double b : config.drive.breakpoints(0.0, t_end)) edges.push_back(b);
  edges.push_back(t_end);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    if (b <= a) continue;
    const LindbladGenerator gen = build_generator(config, dim, 0.5 * (a + b));
    auto rhs = [&](double, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& d) {
      lindblad_rhs(gen, rho, d);
    };
    const auto lo = std::upper_bound(sample_times.begin(), sample_times.end(), a);
    const auto hi = std::upper_bound(sample_times.begin(), sample_times.end(), b);
    const auto outs = sample_times.subspan(lo - sample_times.begin(), hi - lo);
    if (options.fixed_step) {
      report.stats += ode::rk4(rhs, a, b, y, outs, record, *options.fixed_step, hook);
    } else {
      ode::Options o;
      o.rtol = options.rtol;
      o.atol = options.atol;
      o.norm = ode::ErrorNorm::max;
      report.stats += ode::dopri5(rhs, a, b, y, outs, record, o, hook);
    }
  }
  return report;
}

std::vector<std::pair<double, FockDensityMatrix>> evolve_oracle_samples(
    const FockDensityMatrix& rho0, const SimConfig& config, std::span<const double> sample_times,
    const OracleOptions& options) {
  std::vector<std::pair<double, FockDensityMatrix>> out;
  evolve_oracle(
      rho0, config, sample_times,
      [&](double t, const FockDensityMatrix& rho) { out.emplace_back(t, rho); }, options);
  return out;
}

long truncation_dimension(double n_peak, double w1_max) {
  n_peak = std::max(0.0, n_peak);
  return static_cast<long>(std::ceil(n_peak + 8.0 * std::sqrt(std::max(1.0, w1_max) * n_peak) + 30.0));
}

long suggested_dimension(const SimConfig& config, double t_final) {
  const long samples = 2000;
  std::vector<double> times(samples + 1);
  for (long i = 0; i <= samples; ++i) times[i] = t_final * static_cast<double>(i) / samples;
  if (t_final <= 0.0) times.resize(1);
  EvolveOptions opt;
  opt.rtol = 1e-7;
  opt.atol = 1e-10;
  opt.check_physicality = false;
  const TrajectoryPeaks p =
      trajectory_peaks(evolve(HybridState::thermal(config.n_b), config, times, opt));
  return truncation_dimension(p.n_peak, p.w1_max);
}

}  // namespace kerrsim
