#include "kerrsim_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerrsim/errors.hpp"
#include "kerrsim/fock_density.hpp"
#include "kerrsim/fock_gaussian.hpp"
#include "kerrsim/gaussian_state.hpp"
#include "kerrsim/hybrid_evolver.hpp"
#include "kerrsim/lindblad_oracle.hpp"
#include "kerrsim/metrics.hpp"
#include "kerrsim/steady_state.hpp"
#include "kerrsim/units.hpp"

namespace kerrsim::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// One trajectory row: shape variables plus the phase-space state.
struct Row {
  double t = 0.0;
  complex beta;
  double w1 = 1.0, w2 = 1.0, k = 0.0;
  GaussianState g;
  std::optional<double> infidelity;
};

const char* kTrajectoryHeader =
    "t,re_beta,im_beta,w1,w2,k,d0,b,theta,squeeze_factor,unsqueeze_factor,n_th,nbar";

std::string trajectory_csv(const std::vector<Row>& rows, bool with_infidelity) {
  std::string out = kTrajectoryHeader;
  out += with_infidelity ? ",infidelity\n" : "\n";
  for (const Row& r : rows) {
    const double vals[] = {r.t,
                           r.beta.real(),
                           r.beta.imag(),
                           r.w1,
                           r.w2,
                           r.k,
                           r.g.d0(),
                           r.g.b(),
                           r.g.theta(),
                           r.g.squeeze_factor(),
                           r.g.unsqueeze_factor(),
                           thermal_photons(r.g),
                           mean_photon(r.g)};
    bool first = true;
    for (double v : vals) {
      if (!first) out += ',';
      out += format_double(v);
      first = false;
    }
    if (with_infidelity) out += ',' + format_double(r.infidelity.value_or(std::nan("")));
    out += '\n';
  }
  return out;
}

Row row_from_gaussian(double t, const GaussianState& g) {
  Row r{t, g.center(), 1.0, 1.0, 0.0, g, std::nullopt};
  GaussianState probe = g;
  if (std::abs(g.center()) == 0.0) probe = g.with_center({1.0, 0.0});
  try {
    const FockGaussianParams p = from_phase_space(probe);
    r.w1 = p.w1;
    r.w2 = p.w2;
    r.k = p.k;
  } catch (const DegenerateCenter&) {
    r.w1 = r.w2 = std::nan("");
    r.k = std::nan("");
  }
  return r;
}

json state_json(const GaussianState& g) {
  return {{"re_beta", g.center().real()},
          {"im_beta", g.center().imag()},
          {"nbar", mean_photon(g)},
          {"d0", g.d0()},
          {"b", g.b()},
          {"theta", g.theta()},
          {"squeeze_factor", g.squeeze_factor()},
          {"unsqueeze_factor", g.unsqueeze_factor()},
          {"n_th", thermal_photons(g)}};
}

json temperature_json(const GaussianState& g, const SimConfig& c) {
  json j;
  const double n_th = thermal_photons(g);
  j["n_th"] = n_th;
  if (c.n_b > 0.0) j["n_th_over_n_b"] = n_th / c.n_b;
  if (c.omega_r0) {
    j["t_eff_mK"] = 1e3 * units::kelvin(effective_temperature(g, *c.omega_r0));
    j["t_bath_mK"] = 1e3 * units::kelvin(temperature_from_occupation(c.n_b, *c.omega_r0));
  }
  return j;
}

/// Peak squeezing, the contiguous lobe around it where squeeze_factor > 1,
/// and the number of disjoint intervals with squeeze_factor > 2.
json transient_json(const std::vector<Row>& rows) {
  json j;
  if (rows.empty()) return j;
  std::size_t ip = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].g.squeeze_factor() > rows[ip].g.squeeze_factor()) ip = i;
  }
  std::size_t lo = ip, hi = ip;
  while (lo > 0 && rows[lo - 1].g.squeeze_factor() > 1.0) --lo;
  while (hi + 1 < rows.size() && rows[hi + 1].g.squeeze_factor() > 1.0) ++hi;
  double u_max = 0.0, n_max = 0.0, t_u = rows[ip].t, t_n = rows[ip].t;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (rows[i].g.unsqueeze_factor() > u_max) { u_max = rows[i].g.unsqueeze_factor(); t_u = rows[i].t; }
    if (std::norm(rows[i].beta) > n_max) { n_max = std::norm(rows[i].beta); t_n = rows[i].t; }
  }
  int above = 0;
  bool inside = false;
  for (const Row& r : rows) {
    const bool now = r.g.squeeze_factor() > 2.0;
    above += now && !inside;
    inside = now;
  }
  j["peak_squeeze"] = {{"t", rows[ip].t},
                       {"squeeze_factor", rows[ip].g.squeeze_factor()},
                       {"unsqueeze_factor", rows[ip].g.unsqueeze_factor()},
                       {"beta_abs2", std::norm(rows[ip].beta)}};
  j["peak_lobe"] = {{"t_start", rows[lo].t},
                    {"t_end", rows[hi].t},
                    {"max_unsqueeze_factor", u_max},
                    {"t_max_unsqueeze", t_u},
                    {"max_beta_abs2", n_max},
                    {"t_max_beta_abs2", t_n}};
  j["intervals_above_3db"] = above;
  return j;
}

/// Samples where |beta|^2 <= [4 (D0 + b)]^3.
std::optional<std::string> validity_warning(const std::vector<Row>& rows, const std::string& label) {
  long count = 0;
  double first = 0.0;
  for (const Row& r : rows) {
    if (std::norm(r.beta) <= std::pow(r.g.unsqueeze_factor(), 3)) {
      if (count == 0) first = r.t;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  std::ostringstream s;
  s << label << ": |beta|^2 <= [4(D0+b)]^3 at " << count << " of " << rows.size()
    << " samples (first at t=" << format_double(first) << " s); Fock-space Gaussian form may be inaccurate";
  return s.str();
}

bool constant_kerr(const SimConfig& c) {
  return c.nonlinearity.kerr_eta().has_value() && c.drive.segments().size() == 1;
}

/// Analytic steady state on the branch closest to `beta`.
std::optional<json> analytic_steady_near(complex beta, const SimConfig& c, std::vector<std::string>& warnings) {
  if (!constant_kerr(c)) return std::nullopt;
  const auto branches = steady_centers(c);
  if (branches.empty()) return std::nullopt;
  const SteadyBranch* best = &branches.front();
  for (const auto& br : branches) {
    if (std::abs(br.beta - beta) < std::abs(best->beta - beta)) best = &br;
  }
  json j{{"branch", std::string(to_string(best->label))}, {"n_tilde", best->n_tilde}};
  try {
    const SteadyShape s = steady_shape(best->beta, c);
    j["state"] = state_json(s.state);
    j["delta_theta"] = s.delta_theta;
    j["temperature"] = temperature_json(s.state, c);
  } catch (const InstabilityBound& e) {
    warnings.push_back(std::string("analytic steady state: ") + e.what());
  }
  return j;
}

EvolveOptions hybrid_options(const RunSpec& spec) {
  EvolveOptions o;
  o.rtol = spec.rtol;
  o.atol = spec.atol;
  o.fixed_step = spec.fixed_step;
  return o;
}

HybridState initial_hybrid(const RunSpec& spec) {
  return spec.initial == InitialState::thermal ? HybridState::thermal(spec.config.n_b)
                                               : HybridState::vacuum();
}

struct HybridResult {
  std::vector<Row> rows;
  ode::Stats stats;
  double seconds = 0.0;
};

HybridResult run_hybrid_core(const RunSpec& spec, const std::vector<double>& times) {
  const HybridState init = initial_hybrid(spec);
  const EvolveOptions opts = hybrid_options(spec);
  const auto start = Clock::now();
  HybridTrajectory traj = evolve(init, spec.config, times, opts);
  HybridResult res;
  res.seconds = seconds_since(start);
  res.stats = traj.stats;
  res.rows.reserve(traj.samples.size());
  for (const HybridSample& s : traj.samples) {
    res.rows.push_back({s.t, s.state.beta, s.state.w1, s.state.w2, s.state.k, s.gaussian, std::nullopt});
  }
  return res;
}

json stats_json(const ode::Stats& s, const std::optional<double>& fixed_step) {
  return {{"method", fixed_step ? "rk4" : "dopri5"},
          {"accepted_steps", s.accepted},
          {"rejected_steps", s.rejected},
          {"rhs_evaluations", s.rhs_evals}};
}

json base_summary(const RunSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["mode"] = std::string(to_string(spec.mode));
  j["config"] = json::parse(canonical_config(spec));
  return j;
}

void finish(const RunSpec& spec, json summary, const std::vector<std::string>& warnings, std::ostream& log) {
  summary["warnings"] = warnings;
  write_atomic(spec.out_dir / "summary.json", summary.dump(2) + "\n");
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  log << "wrote " << (spec.out_dir / "summary.json").string() << '\n';
}

long oracle_dimension(const RunSpec& spec) {
  if (spec.config.fock_dim > 0) return spec.config.fock_dim;
  return suggested_dimension(spec.config, spec.config.t_final);
}

FockDensityMatrix initial_density(const RunSpec& spec, long dim) {
  return spec.initial == InitialState::thermal ? FockDensityMatrix::thermal(dim, spec.config.n_b)
                                               : FockDensityMatrix::fock_state(dim, 0);
}

OracleOptions oracle_options(const RunSpec& spec) {
  OracleOptions o;
  o.rtol = spec.oracle_rtol;
  o.fixed_step = spec.fixed_step;
  return o;
}

json oracle_json(const OracleReport& rep, long dim, double seconds, const std::optional<double>& fs) {
  json j = stats_json(rep.stats, fs);
  j["dimension"] = dim;
  j["seconds"] = seconds;
  j["max_trace_deficit"] = rep.max_trace_deficit;
  j["max_top_population"] = rep.max_top_population;
  return j;
}

int run_hybrid(const RunSpec& spec, std::ostream& log) {
  const auto times = spec.config.sample_times();
  HybridResult res = run_hybrid_core(spec, times);
  write_atomic(spec.out_dir / "trajectory.csv", trajectory_csv(res.rows, false));
  log << "wrote " << (spec.out_dir / "trajectory.csv").string() << '\n';

  std::vector<std::string> warnings;
  if (auto w = validity_warning(res.rows, "hybrid")) warnings.push_back(*w);
  json s = base_summary(spec);
  s["samples"] = res.rows.size();
  s["integrator"] = stats_json(res.stats, spec.fixed_step);
  s["timing"] = {{"hybrid_seconds", res.seconds}};
  s["final"] = state_json(res.rows.back().g);
  s["final"]["t"] = res.rows.back().t;
  s["temperature"] = temperature_json(res.rows.back().g, spec.config);
  s["transient"] = transient_json(res.rows);
  if (auto a = analytic_steady_near(res.rows.back().beta, spec.config, warnings)) s["analytic_steady"] = *a;
  finish(spec, std::move(s), warnings, log);
  return ExitCode::ok;
}

int run_lindblad(const RunSpec& spec, std::ostream& log) {
  const auto times = spec.config.sample_times();
  const long dim = oracle_dimension(spec);
  log << "oracle dimension " << dim << '\n';
  std::vector<Row> rows;
  std::string diag = "t,fit_infidelity,trace,top_population\n";
  const auto start = Clock::now();
  const OracleReport rep = evolve_oracle(
      initial_density(spec, dim), spec.config, times,
      [&](double t, const FockDensityMatrix& rho) {
        const GaussianFit fit = gaussian_fit(rho);
        rows.push_back(row_from_gaussian(t, fit.state));
        diag += format_double(t) + ',' + format_double(fit.fit_infidelity) + ',' +
                format_double(rho.trace()) + ',' + format_double(rho.top_population()) + '\n';
      },
      oracle_options(spec));
  const double seconds = seconds_since(start);
  write_atomic(spec.out_dir / "trajectory.csv", trajectory_csv(rows, false));
  write_atomic(spec.out_dir / "oracle_diagnostics.csv", diag);
  log << "wrote " << (spec.out_dir / "trajectory.csv").string() << '\n';

  std::vector<std::string> warnings = rep.warnings;
  json s = base_summary(spec);
  s["samples"] = rows.size();
  s["dimension"] = dim;
  s["oracle"] = oracle_json(rep, dim, seconds, spec.fixed_step);
  s["timing"] = {{"oracle_seconds", seconds}};
  s["final"] = state_json(rows.back().g);
  s["final"]["t"] = rows.back().t;
  s["temperature"] = temperature_json(rows.back().g, spec.config);
  s["transient"] = transient_json(rows);
  finish(spec, std::move(s), warnings, log);
  return ExitCode::ok;
}

int run_compare(const RunSpec& spec, std::ostream& log) {
  const auto times = spec.config.sample_times();
  HybridResult hyb = run_hybrid_core(spec, times);
  const long dim = oracle_dimension(spec);
  log << "oracle dimension " << dim << '\n';

  std::vector<Row> oracle_rows;
  std::string diag =
      "t,infidelity,fit_infidelity,coherent_infidelity,oracle_re_beta,oracle_im_beta,oracle_d0,"
      "oracle_b,oracle_theta,oracle_squeeze_factor,oracle_unsqueeze_factor,oracle_nbar\n";
  std::size_t idx = 0;
  const auto start = Clock::now();
  double fidelity_seconds = 0.0;
  const OracleReport rep = evolve_oracle(
      initial_density(spec, dim), spec.config, times,
      [&](double t, const FockDensityMatrix& rho) {
        const auto f0 = Clock::now();
        Row& h = hyb.rows.at(idx++);
        h.infidelity = gaussian_infidelity(rho, h.g);
        const GaussianFit fit = gaussian_fit(rho);
        const double coh = coherent_infidelity(rho, h.beta);
        oracle_rows.push_back(row_from_gaussian(t, fit.state));
        const GaussianState& o = fit.state;
        const double vals[] = {t, *h.infidelity, fit.fit_infidelity, coh,
                               o.center().real(), o.center().imag(), o.d0(), o.b(), o.theta(),
                               o.squeeze_factor(), o.unsqueeze_factor(), mean_photon(o)};
        bool first = true;
        for (double v : vals) {
          if (!first) diag += ',';
          diag += format_double(v);
          first = false;
        }
        diag += '\n';
        fidelity_seconds += seconds_since(f0);
      },
      oracle_options(spec));
  const double oracle_seconds = seconds_since(start) - fidelity_seconds;
  write_atomic(spec.out_dir / "trajectory.csv", trajectory_csv(hyb.rows, true));
  write_atomic(spec.out_dir / "compare_diagnostics.csv", diag);
  log << "wrote " << (spec.out_dir / "trajectory.csv").string() << '\n';

  std::vector<std::string> warnings = rep.warnings;
  if (auto w = validity_warning(hyb.rows, "hybrid")) warnings.push_back(*w);

  std::size_t ipk = 0;
  for (std::size_t i = 0; i < hyb.rows.size(); ++i) {
    if (*hyb.rows[i].infidelity > *hyb.rows[ipk].infidelity) ipk = i;
  }
  const Row& last = hyb.rows.back();
  json s = base_summary(spec);
  s["samples"] = hyb.rows.size();
  s["dimension"] = dim;
  s["integrator"] = stats_json(hyb.stats, spec.fixed_step);
  s["oracle"] = oracle_json(rep, dim, oracle_seconds, spec.fixed_step);
  s["timing"] = {{"hybrid_seconds", hyb.seconds},
                 {"oracle_seconds", oracle_seconds},
                 {"fidelity_seconds", fidelity_seconds},
                 {"speedup", oracle_seconds / std::max(hyb.seconds, 1e-9)}};
  s["infidelity"] = {{"final", *last.infidelity},
                     {"peak", *hyb.rows[ipk].infidelity},
                     {"t_peak", hyb.rows[ipk].t}};
  s["final"] = state_json(last.g);
  s["final"]["t"] = last.t;
  s["oracle_final"] = state_json(oracle_rows.back().g);
  s["temperature"] = temperature_json(last.g, spec.config);
  s["oracle_temperature"] = temperature_json(oracle_rows.back().g, spec.config);
  s["transient"] = transient_json(hyb.rows);
  if (auto a = analytic_steady_near(last.beta, spec.config, warnings)) s["analytic_steady"] = *a;
  finish(spec, std::move(s), warnings, log);
  return ExitCode::ok;
}

/// Steady rows for one constant-drive config.
struct SteadyRow {
  SteadyBranch branch;
  complex beta;
  std::optional<SteadyShape> shape;
  std::string status = "ok";
};

std::vector<SteadyRow> steady_rows(const SimConfig& c) {
  std::vector<SteadyRow> out;
  const auto branches = steady_centers(c);
  for (const SteadyBranch& br : branches) {
    SteadyRow r{br, br.beta, std::nullopt, "ok"};
    try {
      r.shape = steady_shape(br.beta, c);
    } catch (const InstabilityBound&) {
      r.status = "instability_bound";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string steady_fields(const SteadyRow& r, const SimConfig& c) {
  const double nan = std::nan("");
  const GaussianState* g = r.shape ? &r.shape->state : nullptr;
  const double vals[] = {r.branch.n_tilde,
                         r.beta.real(),
                         r.beta.imag(),
                         g ? g->d0() : nan,
                         g ? g->b() : nan,
                         g ? g->theta() : nan,
                         g ? g->squeeze_factor() : nan,
                         g ? g->unsqueeze_factor() : nan,
                         g ? thermal_photons(*g) : nan,
                         g ? mean_photon(*g) : nan,
                         g ? 4.0 * g->min_variance() / c.c_b() : nan};
  std::string out(to_string(r.branch.label));
  for (double v : vals) out += ',' + format_double(v);
  return out;
}

const char* kSteadyColumns =
    "branch,n_tilde,re_beta,im_beta,d0,b,theta,squeeze_factor,unsqueeze_factor,n_th,nbar,"
    "scaled_min_variance";

int run_steady(const RunSpec& spec, std::ostream& log) {
  const SimConfig& c = spec.config;
  const auto start = Clock::now();
  const auto rows = steady_rows(c);
  const double seconds = seconds_since(start);
  std::string csv = std::string(kSteadyColumns) + ",status\n";
  for (const auto& r : rows) csv += steady_fields(r, c) + ',' + r.status + '\n';
  write_atomic(spec.out_dir / "steady.csv", csv);
  log << "wrote " << (spec.out_dir / "steady.csv").string() << '\n';

  std::vector<std::string> warnings;
  json s = base_summary(spec);
  const double eta = c.nonlinearity.kerr_eta().value_or(0.0);
  if (eta != 0.0) {
    const DimensionlessConfig d = rescale(c);
    const bool critical = is_critical_point(d.eps_tilde, d.delta_omega_tilde);
    s["eps_tilde"] = d.eps_tilde;
    s["delta_omega_tilde"] = d.delta_omega_tilde;
    s["sign_eta"] = d.sign_eta;
    s["cubic_discriminant"] = cubic_discriminant(d.eps_tilde, d.delta_omega_tilde);
    s["critical_point"] = critical;
    s["root_multiplicity"] = critical ? 3 : (rows.size() == 3 ? 1 : 1);
    s["bistable"] = rows.size() == 3;
    if (auto bb = bistability_bounds(d.delta_omega_tilde)) {
      s["bistability_bounds"] = {{"eps_low", bb->eps_low}, {"eps_high", bb->eps_high},
                                 {"n_low", bb->n_low}, {"n_high", bb->n_high}};
    }
    if (critical) warnings.push_back("drive is at the critical point: the three steady roots merge");
  }
  json branches = json::array();
  for (const auto& r : rows) {
    json b{{"label", std::string(to_string(r.branch.label))}, {"n_tilde", r.branch.n_tilde}, {"status", r.status}};
    if (r.shape) {
      b["state"] = state_json(r.shape->state);
      b["delta_theta"] = r.shape->delta_theta;
      b["temperature"] = temperature_json(r.shape->state, c);
    } else {
      warnings.push_back(std::string(to_string(r.branch.label)) + " branch is unstable (instability bound)");
    }
    branches.push_back(std::move(b));
  }
  s["branches"] = branches;
  s["timing"] = {{"steady_seconds", seconds}};
  finish(spec, std::move(s), warnings, log);
  return ExitCode::ok;
}

std::vector<double> axis_values(const SweepAxis& a) {
  std::vector<double> v(static_cast<std::size_t>(a.count));
  for (int i = 0; i < a.count; ++i) {
    v[static_cast<std::size_t>(i)] =
        a.count == 1 ? a.start : a.start + (a.stop - a.start) * i / (a.count - 1);
  }
  return v;
}

void apply_parameter(SimConfig& c, const std::string& name, double value) {
  const complex a0 = c.drive.segments().empty() ? complex{} : c.drive.segments().front().amplitude;
  const double phase = std::abs(a0) > 0.0 ? std::arg(a0) : 0.0;
  const double eta = c.nonlinearity.kerr_eta().value_or(0.0);
  if (name == "eps_tilde") {
    c.drive = DriveSchedule::constant(std::polar(value * c.kappa * std::sqrt(c.kappa / std::abs(eta)), phase));
  } else if (name == "drive") {
    c.drive = DriveSchedule::constant(std::polar(value, phase));
  } else if (name == "delta_omega_tilde") {
    c.detuning = -(eta < 0.0 ? -1.0 : 1.0) * value * c.kappa;
  } else if (name == "detuning") {
    c.detuning = value;
  } else if (name == "n_b") {
    c.n_b = value;
  }
}

struct SweepPoint {
  std::vector<double> values;
  std::vector<std::string> lines;
  double max_squeeze = 0.0;
  double min_scaled = 1e300;
  long instability = 0;
  std::string error;
  bool overflow = false;
};

void evaluate_point(const RunSpec& spec, SweepPoint& p) {
  SimConfig c = spec.config;
  for (std::size_t i = 0; i < spec.sweep_axes.size(); ++i) apply_parameter(c, spec.sweep_axes[i].parameter, p.values[i]);
  std::string prefix;
  for (double v : p.values) prefix += format_double(v) + ',';
  if (spec.sweep_mode == Mode::steady) {
    for (const SteadyRow& r : steady_rows(c)) {
      const double sq = r.shape ? r.shape->squeeze_factor : std::nan("");
      if (r.shape) {
        p.max_squeeze = std::max(p.max_squeeze, sq);
        p.min_scaled = std::min(p.min_scaled, 4.0 * r.shape->state.min_variance() / c.c_b());
      } else {
        ++p.instability;
      }
      p.lines.push_back(prefix + steady_fields(r, c) + ',' + format_double(sq) + ',' + r.status);
    }
    return;
  }
  RunSpec sub = spec;
  sub.config = c;
  HybridResult res = run_hybrid_core(sub, c.sample_times());
  double peak = 0.0;
  for (const Row& r : res.rows) peak = std::max(peak, r.g.squeeze_factor());
  p.max_squeeze = peak;
  for (const Row& r : res.rows) p.min_scaled = std::min(p.min_scaled, 4.0 * r.g.min_variance() / c.c_b());
  const Row& f = res.rows.back();
  SteadyRow sr{SteadyBranch{f.beta, std::norm(f.beta) * std::abs(c.nonlinearity.kerr_eta().value_or(0.0)) / c.kappa,
                            BranchLabel::single},
               f.beta, SteadyShape{f.g, f.g.squeeze_factor(), f.g.unsqueeze_factor(), 0.0}, "ok"};
  std::string line = prefix + steady_fields(sr, c);
  line.replace(prefix.size(), std::string(to_string(BranchLabel::single)).size(), "final");
  p.lines.push_back(line + ',' + format_double(peak) + ",ok");
}

int run_sweep(const RunSpec& spec, std::ostream& log) {
  std::vector<std::vector<double>> grids;
  for (const auto& a : spec.sweep_axes) grids.push_back(axis_values(a));
  std::vector<SweepPoint> points(1);
  for (const auto& g : grids) {
    std::vector<SweepPoint> next;
    next.reserve(points.size() * g.size());
    for (const auto& p : points) {
      for (double v : g) {
        SweepPoint q;
        q.values = p.values;
        q.values.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  const auto start = Clock::now();
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(points.size())));
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        evaluate_point(spec, points[i]);
      } catch (const TruncationOverflow& e) {
        points[i].error = e.what();
        points[i].overflow = true;
      } catch (const std::exception& e) {
        points[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  const double seconds = seconds_since(start);

  std::string csv;
  for (const auto& a : spec.sweep_axes) csv += a.parameter + ',';
  csv += std::string(kSteadyColumns) + ",peak_squeeze_factor,status\n";
  double max_sq = 0.0, min_scaled = 1e300;
  long rows = 0, instability = 0, failures = 0;
  bool overflow = false;
  std::vector<std::string> warnings;
  for (const auto& p : points) {
    for (const auto& l : p.lines) csv += l + '\n';
    rows += static_cast<long>(p.lines.size());
    max_sq = std::max(max_sq, p.max_squeeze);
    min_scaled = std::min(min_scaled, p.min_scaled);
    instability += p.instability;
    if (!p.error.empty()) {
      ++failures;
      overflow = overflow || p.overflow;
      std::string where;
      for (double v : p.values) where += (where.empty() ? "" : ",") + format_double(v);
      warnings.push_back("point (" + where + ") failed: " + p.error);
    }
  }
  write_atomic(spec.out_dir / "sweep.csv", csv);
  log << "wrote " << (spec.out_dir / "sweep.csv").string() << '\n';

  json s = base_summary(spec);
  s["sweep_mode"] = std::string(to_string(spec.sweep_mode));
  s["points"] = points.size();
  s["rows"] = rows;
  s["workers"] = workers;
  s["max_squeeze_factor"] = max_sq;
  s["min_scaled_min_variance"] = min_scaled;
  s["instability_skipped"] = instability;
  s["failed_points"] = failures;
  s["timing"] = {{"sweep_seconds", seconds}};
  finish(spec, std::move(s), warnings, log);
  if (failures > 0) return overflow ? ExitCode::truncation_overflow : ExitCode::numerical_failure;
  return ExitCode::ok;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 11);
  return std::string(buf, res.ptr);
}

int run(const RunSpec& spec, std::ostream& log) {
  try {
    std::filesystem::create_directories(spec.out_dir);
    switch (spec.mode) {
      case Mode::hybrid: return run_hybrid(spec, log);
      case Mode::lindblad: return run_lindblad(spec, log);
      case Mode::compare: return run_compare(spec, log);
      case Mode::steady: return run_steady(spec, log);
      case Mode::sweep: return run_sweep(spec, log);
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const TruncationOverflow& e) {
    log << "truncation overflow in " << to_string(spec.mode) << " run '" << spec.name << "': " << e.what()
        << '\n';
    return ExitCode::truncation_overflow;
  } catch (const std::invalid_argument& e) {
    log << "invalid input in " << to_string(spec.mode) << " run '" << spec.name << "': " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const std::exception& e) {
    log << "numerical failure in " << to_string(spec.mode) << " run '" << spec.name << "': " << e.what()
        << '\n';
    return ExitCode::numerical_failure;
  }
  return ExitCode::numerical_failure;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Driven nonlinear resonator simulator"};
  app.name("simulate");
  std::string mode_name, config_path, out_dir, fixed_step;
  long fock_dim = -1;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("mode", mode_name, "hybrid | lindblad | compare | steady | sweep")
      ->required()
      ->check(CLI::IsMember({"hybrid", "lindblad", "compare", "steady", "sweep"}));
  app.add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--fixed-step", fixed_step, "fixed RK4 step, e.g. 0.001/kappa or 1 ns");
  app.add_option("--fock-dim", fock_dim, "oracle Fock dimension (overrides config)");
  app.add_option("--workers", workers, "sweep worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return ExitCode::config_error;
  }

  RunSpec spec;
  try {
    std::ifstream f(config_path, std::ios::binary);
    std::stringstream buf;
    buf << f.rdbuf();
    spec = validate_config(buf.str(), *parse_mode(mode_name));
    if (!fixed_step.empty()) {
      try {
        spec.fixed_step = parse_time(fixed_step, spec.config.kappa);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("--fixed-step", e.what());
      }
      if (!(*spec.fixed_step > 0.0)) throw ConfigError("--fixed-step", "must be positive");
    }
    if (fock_dim >= 0) {
      if (fock_dim < 2) throw ConfigError("--fock-dim", "must be >= 2");
      spec.config.fock_dim = fock_dim;
    }
  } catch (const ConfigError& e) {
    err << "config error in " << config_path << ": " << e.what() << '\n';
    return ExitCode::config_error;
  }
  spec.out_dir = out_dir;
  spec.workers = workers;
  std::ostringstream log;
  const int code = run(spec, log);
  (code == ExitCode::ok ? out : err) << log.str();
  return code;
}

}  // namespace kerrsim::cli
