#pragma once

// Explicit Runge-Kutta drivers over Eigen dense types (vectors or matrices).
//
// dopri5: Dormand-Prince 5(4) with FSAL, PI step control and the 4th-order
// continuous extension of Hairer & Wanner, used to report samples between
// steps. rk4: classical fixed-step scheme that lands exactly on sample times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "kerrsim/errors.hpp"

namespace kerrsim::ode {

enum class ErrorNorm { rms, max };

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: pick automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
  ErrorNorm norm = ErrorNorm::rms;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;

  Stats& operator+=(const Stats& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    rhs_evals += o.rhs_evals;
    return *this;
  }
};

namespace detail {

template <class Vec>
double scaled_error(const Vec& err, const Vec& y0, const Vec& y1, const Options& opt) {
  const auto ratio = (err.cwiseAbs().array() /
                      (opt.atol + opt.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()))
                         .eval();
  if (opt.norm == ErrorNorm::max) return ratio.maxCoeff();
  return std::sqrt(ratio.square().sum() / static_cast<double>(err.size()));
}

struct NoHook {
  template <class Vec>
  bool operator()(double, Vec&) const {
    return false;
  }
};

}  // namespace detail

/// Integrates y' = f(t, y, dydt) from t0 to t_end. `observe(t, y)` is called
/// for every entry of `t_out` inside (t0, t_end] in order, using dense output.
/// `post_step(t, y)` may modify an accepted state and must return true if it did.
/// Throws IntegrationFailure on step-size underflow or step budget exhaustion.
template <class Vec, class Rhs, class Observer, class Hook = detail::NoHook>
Stats dopri5(Rhs&& f, double t0, double t_end, Vec& y, std::span<const double> t_out,
             Observer&& observe, const Options& opt = {}, Hook&& post_step = {}) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  Stats stats;
  std::size_t next_out = 0;
  while (next_out < t_out.size() && t_out[next_out] <= t0) ++next_out;
  if (t_end <= t0) return stats;

  Vec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  for (Vec* k : {&k1, &k2, &k3, &k4, &k5, &k6, &k7}) k->resizeLike(y);
  auto eval = [&](double t, const Vec& yy, Vec& out) {
    f(t, yy, out);
    ++stats.rhs_evals;
  };
  eval(t0, y, k1);

  double t = t0;
  double h = opt.h_init;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    const auto scale = (opt.atol + opt.rtol * y.cwiseAbs().array()).eval();
    const double n = static_cast<double>(y.size());
    const double dn0 = std::sqrt((y.cwiseAbs().array() / scale).square().sum() / n);
    const double dn1 = std::sqrt((k1.cwiseAbs().array() / scale).square().sum() / n);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, t_end - t0);
    ytmp = y + h0 * k1;
    eval(t + h0, ytmp, k2);
    const double dn2 =
        std::sqrt(((k2 - k1).cwiseAbs().array() / scale).square().sum() / n) / h0;
    const double big = std::max(dn1, dn2);
    const double h1 = big <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / big, 0.2);
    h = std::min({100.0 * h0, h1, t_end - t0});
  }
  h = std::min(h, opt.h_max);

  double err_old = 1e-4;
  bool last_rejected = false;
  while (t < t_end) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw IntegrationFailure("dopri5: step budget exhausted", t);
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw IntegrationFailure("dopri5: step size underflow", t);
    }
    const bool final_step = t + 1.01 * h >= t_end;
    if (final_step) h = t_end - t;

    ytmp = y + h * (a21 * k1);
    eval(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    eval(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    eval(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    eval(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    eval(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = final_step ? t_end : t + h;
    eval(t_new, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::scaled_error(err, y, ynew, opt);

    if (!std::isfinite(en)) {
      ++stats.rejected;
      h *= 0.1;
      last_rejected = true;
      continue;
    }
    if (en <= 1.0) {
      ++stats.accepted;
      // Dense output: y(t + s h) = y + s (dy + (1-s)(bspl + s (dy2 + (1-s) r5)))
      while (next_out < t_out.size() && t_out[next_out] <= t_new) {
        const double s = (t_out[next_out] - t) / h;
        const double s1 = 1.0 - s;
        const Vec dy = ynew - y;
        const Vec bspl = h * k1 - dy;
        const Vec dy2 = dy - h * k7 - bspl;
        const Vec r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        const Vec ys = y + s * (dy + s1 * (bspl + s * (dy2 + s1 * r5)));
        observe(t_out[next_out], ys);
        ++next_out;
      }
      y.swap(ynew);
      t = t_new;
      if (post_step(t, y)) {
        eval(t, y, k1);
      } else {
        k1.swap(k7);
      }
      // PI controller (beta = 0.04).
      double fac = std::pow(std::max(en, 1e-10), 0.17) / std::pow(err_old, 0.04) / 0.9;
      fac = std::clamp(fac, 0.1, 5.0);
      if (last_rejected) fac = std::max(fac, 1.0);
      h = std::min(h / fac, opt.h_max);
      err_old = std::max(en, 1e-4);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h /= std::min(5.0, std::pow(en, 0.2) / 0.9);
      last_rejected = true;
    }
  }
  return stats;
}

/// Classical RK4 with step h, shortened to hit every sample time and t_end.
template <class Vec, class Rhs, class Observer, class Hook = detail::NoHook>
Stats rk4(Rhs&& f, double t0, double t_end, Vec& y, std::span<const double> t_out,
          Observer&& observe, double h, Hook&& post_step = {}) {
  Stats stats;
  if (!(h > 0.0)) throw std::invalid_argument("rk4: step must be positive");
  std::size_t next_out = 0;
  while (next_out < t_out.size() && t_out[next_out] <= t0) ++next_out;
  Vec k1, k2, k3, k4, tmp;
  for (Vec* k : {&k1, &k2, &k3, &k4}) k->resizeLike(y);
  double t = t0;
  while (t < t_end) {
    double target = t_end;
    if (next_out < t_out.size()) target = std::min(target, t_out[next_out]);
    double step = target - t;
    // Whole steps of h, the remainder folded into the final one.
    const double n_steps = std::max(1.0, std::ceil(step / h - 1e-9));
    step /= n_steps;
    for (long i = 0; i < static_cast<long>(n_steps); ++i) {
      f(t, y, k1);
      tmp = y + (0.5 * step) * k1;
      f(t + 0.5 * step, tmp, k2);
      tmp = y + (0.5 * step) * k2;
      f(t + 0.5 * step, tmp, k3);
      tmp = y + step * k3;
      f(t + step, tmp, k4);
      y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = (i + 1 == static_cast<long>(n_steps)) ? target : t + step;
      post_step(t, y);
      stats.rhs_evals += 4;
      ++stats.accepted;
    }
    if (next_out < t_out.size() && t_out[next_out] == target) {
      observe(t, y);
      ++next_out;
    }
  }
  return stats;
}

}  // namespace kerrsim::ode
