// End-to-end acceptance checks. Scenario runs go through the CLI entry point
// with the bundled fixtures; each criterion prints one PASS/FAIL line.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerrsim/errors.hpp"
#include "kerrsim/fock_gaussian.hpp"
#include "kerrsim/hybrid_evolver.hpp"
#include "kerrsim/metrics.hpp"
#include "kerrsim/steady_state.hpp"
#include "kerrsim_cli/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kerrsim;

namespace {

// Tolerances.
constexpr double kBumpMax = 1.2e-3;
constexpr double kSteadyLo = 1e-4, kSteadyHi = 6e-4;
constexpr double kSnapshot = 2.5e-4, kSnapshotRel = 0.30;
constexpr double kCoherentRatioMin = 50.0;
constexpr double kTeff = 98.0, kTeffZero = 96.0, kTeffTol = 2.0;
constexpr double kHeatRatio = 17.3, kHeatRatioTol = 0.5;
constexpr double kScalingSlope = -2.0, kScalingSlopeTol = 0.3;
constexpr double kConversionFactor = 2.0;
constexpr double kConversionSlopeTol = 0.15;
constexpr double kTransientRel = 0.05;
constexpr double kEquivalence = 1e-8, kFixedPoint = 1e-8, kMoments = 1e-10, kSmallDamping = 1e-3,
                 kLinear = 1e-9;
constexpr double kSpeedupMin = 1e3;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("missing column " + name);
  }
  double at(std::size_t row, const std::string& name) const { return rows.at(row).at(col(name)); }
};

Table read_csv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  Table t;
  std::string line, cell;
  std::getline(f, line);
  std::stringstream hs(line);
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(f, line)) {
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  return t;
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  return json::parse(f);
}

class Report {
 public:
  void line(int id, bool pass, const std::string& what) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << what << std::endl;
    failures_ += pass ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

class Runner {
 public:
  explicit Runner(fs::path out) : out_(std::move(out)) {}

  /// Runs a fixture through the CLI; returns the output directory.
  fs::path run(const std::string& fixture, cli::Mode mode, const std::string& tag = "",
               void (*tweak)(cli::RunSpec&) = nullptr) {
    std::ifstream f(fs::path(KERRSIM_FIXTURE_DIR) / (fixture + ".json"));
    std::stringstream buf;
    buf << f.rdbuf();
    cli::RunSpec spec = cli::validate_config(buf.str(), mode);
    if (tweak) tweak(spec);
    spec.out_dir = out_ / (fixture + tag + "_" + std::string(cli::to_string(mode)));
    spec.workers = 1;
    std::ostringstream log;
    const auto start = std::chrono::steady_clock::now();
    const int code = cli::run(spec, log);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "  ran " << fixture << tag << " (" << cli::to_string(mode) << ") in " << fmt(secs, 3)
              << " s, exit " << code << std::endl;
    if (code != 0) throw std::runtime_error(fixture + " failed: " + log.str());
    return spec.out_dir;
  }

 private:
  fs::path out_;
};

template <class F>
void guarded(Report& rep, int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    rep.line(id, false, std::string("exception: ") + e.what());
  }
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Worst case over theta of the conversion infidelity for a pure shape with
/// unsqueeze factor u = 4 (D0 + b).
double max_conversion_infidelity(double u, double beta) {
  const double d0 = (u + 1.0 / u) / 8.0, b = (u - 1.0 / u) / 8.0;
  double worst = 0.0;
  const int n_theta = b > 0.0 ? 12 : 1;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n_theta;
    const FockGaussianParams p = from_phase_space(GaussianState({beta, 0.0}, d0, b, theta));
    worst = std::max(worst, conversion_infidelity(p));
  }
  return worst;
}

SimConfig random_kerr(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SimConfig c;
  c.kappa = 0.5 + 2.0 * u(rng);
  const double eta = (u(rng) < 0.5 ? -1.0 : 1.0) * c.kappa * (0.001 + 0.05 * u(rng));
  c.nonlinearity = NonlinearityModel::kerr(eta);
  c.detuning = -(eta < 0 ? -1.0 : 1.0) * (-3.0 + 3.8 * u(rng)) * c.kappa;
  const double eps = (0.02 + 0.4 * u(rng)) * c.kappa * std::sqrt(c.kappa / std::abs(eta));
  c.drive = DriveSchedule::constant(std::polar(eps, 6.28 * u(rng)));
  c.n_b = 0.8 * u(rng);
  return c;
}

std::vector<double> grid(double t_final, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t_final * i / n;
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out = (fs::temp_directory_path() / "kerrsim_acceptance").string();
  app.add_option("--out", out, "directory for run outputs");
  CLI11_PARSE(app, argc, argv);
  fs::remove_all(out);
  fs::create_directories(out);
  Runner runner{fs::path(out)};
  Report rep;

  // Criteria 1, 2, 3, 9 share the fig4 compare run.
  fs::path fig4;
  try {
    fig4 = runner.run("fig4", cli::Mode::compare);
  } catch (const std::exception& e) {
    std::cout << "  fig4 compare run failed: " << e.what() << std::endl;
  }

  guarded(rep, 1, [&] {
    const Table traj = read_csv(fig4 / "trajectory.csv");
    const json s = read_json(fig4 / "summary.json");
    double peak = 0.0, t_peak = 0.0;
    for (std::size_t i = 0; i < traj.rows.size(); ++i) {
      if (traj.at(i, "infidelity") > peak) {
        peak = traj.at(i, "infidelity");
        t_peak = traj.at(i, "t");
      }
    }
    const double kappa = s["config"]["kappa"];
    const double final_inf = traj.at(traj.rows.size() - 1, "infidelity");
    const double t_final = traj.at(traj.rows.size() - 1, "t") * kappa;
    const long dim = s["dimension"];
    const double hyb = s["timing"]["hybrid_seconds"];
    const bool pass = peak < kBumpMax && final_inf >= kSteadyLo && final_inf <= kSteadyHi &&
                      std::abs(t_final - 15.0) < 1e-9 && within_rel(final_inf, kSnapshot, kSnapshotRel) &&
                      dim > 180 && dim < 280 && hyb < 0.1;
    rep.line(1, pass,
             "fig4 hybrid vs oracle: bump " + fmt(peak) + " at kappa t=" + fmt(t_peak * kappa, 3) +
                 " (<1.2e-3); 1-F(15/kappa)=" + fmt(final_inf) + " (2.5e-4 +-30%, steady in [1e-4,6e-4]); N=" +
                 std::to_string(dim) + "; hybrid " + fmt(hyb * 1e3, 3) + " ms (<100 ms)");
  });

  guarded(rep, 2, [&] {
    const Table d = read_csv(fig4 / "compare_diagnostics.csv");
    const std::size_t last = d.rows.size() - 1;
    const double ratio = d.at(last, "coherent_infidelity") / d.at(last, "infidelity");
    rep.line(2, ratio >= kCoherentRatioMin,
             "coherent-state infidelity " + fmt(d.at(last, "coherent_infidelity")) + " vs hybrid " +
                 fmt(d.at(last, "infidelity")) + ": ratio " + fmt(ratio) + " (>=50)");
  });

  guarded(rep, 3, [&] {
    const json s = read_json(fig4 / "summary.json");
    const double t_eff = s["temperature"]["t_eff_mK"];
    const double ratio = s["temperature"]["n_th_over_n_b"];
    const fs::path zero = runner.run("fig4", cli::Mode::hybrid, "_tb0", [](cli::RunSpec& r) { r.config.n_b = 0.0; });
    const double t_zero = read_json(zero / "summary.json")["temperature"]["t_eff_mK"];
    const bool pass = std::abs(t_eff - kTeff) <= kTeffTol && std::abs(t_zero - kTeffZero) <= kTeffTol &&
                      std::abs(ratio - kHeatRatio) <= kHeatRatioTol;
    rep.line(3, pass,
             "T_eff " + fmt(t_eff) + " mK (98+-2) at T_b=50 mK; T_eff " + fmt(t_zero) +
                 " mK (96+-2) at T_b=0; n_th/n_b " + fmt(ratio) + " (17.3+-0.5)");
  });

  guarded(rep, 4, [&] {
    std::vector<double> lb, lf;
    std::string detail;
    for (const char* name : {"fig7_50", "fig7_100", "fig7_200"}) {
      const fs::path dir = runner.run(name, cli::Mode::compare);
      const Table t = read_csv(dir / "trajectory.csv");
      const std::size_t last = t.rows.size() - 1;
      const double beta = std::hypot(t.at(last, "re_beta"), t.at(last, "im_beta"));
      const double inf = t.at(last, "infidelity");
      lb.push_back(std::log(beta));
      lf.push_back(std::log(inf));
      detail += std::string(name) + ": n_st=" + fmt(beta * beta) + " 1-F=" + fmt(inf) + "; ";
    }
    const double slope = lsq_slope(lb, lf);
    rep.line(4, std::abs(slope - kScalingSlope) <= kScalingSlopeTol,
             detail + "log-log slope vs |beta_st| " + fmt(slope) + " (-2+-0.3)");
  });

  guarded(rep, 5, [&] {
    bool pass = true;
    std::string detail = "|beta|=40: ";
    for (double u : {1.0, 2.0, 4.0, 8.0}) {
      const double got = max_conversion_infidelity(u, 40.0);
      const double est = 0.04 * u * u * u / 1600.0;
      const double r = got / est;
      pass = pass && r <= kConversionFactor && r >= 1.0 / kConversionFactor;
      detail += "u=" + fmt(u, 2) + " ratio " + fmt(r, 3) + "; ";
    }
    std::vector<double> lb, lf;
    for (double beta : {10.0, 20.0, 40.0, 60.0}) {
      lb.push_back(std::log(beta));
      lf.push_back(std::log(max_conversion_infidelity(4.0, beta)));
    }
    const double slope = lsq_slope(lb, lf);
    pass = pass && std::abs(slope + 2.0) <= kConversionSlopeTol;
    rep.line(5, pass, detail + "slope vs |beta| (u=4, 10..60) " + fmt(slope) + " (-2+-0.15)");
  });

  guarded(rep, 6, [&] {
    const fs::path dir = runner.run("three_db_sweep", cli::Mode::sweep);
    const json s = read_json(dir / "summary.json");
    const long points = s["points"];
    const double sq = s["max_squeeze_factor"];
    const double mv = s["min_scaled_min_variance"];
    const long skipped = s["instability_skipped"];
    rep.line(6, points >= 10000 && sq < 2.0 && mv > 0.5,
             std::to_string(points) + " steady points, " + std::to_string(long(s["rows"])) +
                 " branches (" + std::to_string(skipped) + " unstable skipped): max squeeze " + fmt(sq, 6) +
                 " (<2), min 4(D0-b)/(1+2n_b) " + fmt(mv, 6) + " (>1/2)");
  });

  guarded(rep, 7, [&] {
    auto transient = [&](const std::string& name) {
      return read_json(runner.run(name, cli::Mode::hybrid) / "summary.json");
    };
    const json a10 = transient("fig9a_10");
    const json a15 = transient("fig9a_15");
    const json b3 = transient("fig9b_3");
    const json f8 = transient("fig8");
    transient("fig9a_5");
    transient("fig9b_m3");
    transient("fig9b_0");
    const double scale = 1.0 / 0.03;  // kappa / |eta| for these fixtures
    const int peaks = a10["transient"]["intervals_above_3db"];
    const double sq15 = a15["transient"]["peak_squeeze"]["squeeze_factor"];
    const double un15 = a15["transient"]["peak_lobe"]["max_unsqueeze_factor"];
    const double n15 = double(a15["transient"]["peak_lobe"]["max_beta_abs2"]) / scale;
    const double sq3 = b3["transient"]["peak_squeeze"]["squeeze_factor"];
    const double un3 = b3["transient"]["peak_lobe"]["max_unsqueeze_factor"];
    const int peaks8 = f8["transient"]["intervals_above_3db"];
    const bool pass = peaks >= 3 && peaks8 >= 3 && within_rel(sq15, 5.6, kTransientRel) &&
                      within_rel(un15, 7.8, kTransientRel) && within_rel(n15, 13.9, kTransientRel) &&
                      within_rel(sq3, 7.6, kTransientRel) && within_rel(un3, 16.3, kTransientRel);
    rep.line(7, pass,
             "eps~=10: " + std::to_string(peaks) + " intervals above 3 dB in [0,5/kappa] (>=3); eps~=15: peak " +
                 fmt(sq15) + " (5.6), lobe unsqueeze " + fmt(un15) + " (7.8), |beta|^2 " + fmt(n15) +
                 " kappa/|eta| (13.9); dw~=3: peak " + fmt(sq3) + " (7.6), unsqueeze " + fmt(un3) + " (16.3)");
  });

  guarded(rep, 8, [&] {
    std::mt19937_64 rng(2024);
    double e_phase = 0.0, e_fixed = 0.0, e_mom = 0.0, e_small = 0.0, e_lin = 0.0;
    // Hybrid form vs phase form.
    for (int i = 0; i < 10; ++i) {
      SimConfig c = random_kerr(rng);
      const GaussianState g0({3.0, 1.0}, 0.3 * c.c_b(), 0.05, 1.0);
      const auto times = grid(6.0 / c.kappa, 30);
      const EvolveOptions tight{1e-12, 1e-14};
      const auto a = evolve(HybridState::from_gaussian(g0), c, times, tight);
      const auto b = evolve_phase_form(g0.center(), {g0.d0(), g0.b(), g0.theta() - 2 * std::arg(g0.center())}, c,
                                       times, tight);
      for (std::size_t k = 0; k < b.size(); ++k) {
        const GaussianState x = a.samples[k].gaussian, y = b[k].gaussian();
        e_phase = std::max({e_phase, std::abs(x.center() - y.center()), std::abs(x.d0() - y.d0()),
                            std::abs(x.b() - y.b()),
                            std::abs(std::remainder(x.theta() - y.theta(), 2 * std::numbers::pi)) * x.b()});
      }
    }
    // Steady shape: fixed point, and agreement with the linearized moments.
    int sets = 0;
    while (sets < 100) {
      const SimConfig c = random_kerr(rng);
      for (const SteadyBranch& br : steady_centers(c)) {
        SteadyShape s;
        try {
          s = steady_shape(br.beta, c);
        } catch (const InstabilityBound&) {
          continue;
        }
        const HybridState h = HybridState::from_gaussian(s.state);
        const HybridState d = hybrid_rhs(0.0, h, c);
        const double res = std::max({std::abs(d.w1), std::abs(d.w2), std::abs(d.k)});
        e_fixed = std::max(e_fixed, res / (c.kappa * std::max(1.0, h.w1)));
        const GaussianState m = drummond_state(br.beta, c);
        e_mom = std::max({e_mom, std::abs(m.d0() - s.state.d0()) / std::max(1.0, s.state.d0()),
                          std::abs(m.b() - s.state.b()) / std::max(1.0, s.state.d0())});
      }
      ++sets;
    }
    // Small-damping limit.
    for (double eps : {0.25, 0.6, 1.5}) {
      for (double delta : {-1.0, 1.0}) {
        SimConfig c;
        c.kappa = 1e-4;
        c.nonlinearity = NonlinearityModel::kerr(-1.0);
        c.detuning = -delta;
        c.drive = DriveSchedule::constant(eps);
        c.n_b = 0.3;
        const double bp = -eps * eps / (delta * delta * delta);
        for (const DykmanResult& dk : dykman_limit(bp, c.n_b)) {
          const double q2 = std::real(dk.q * dk.q);
          const auto branches = steady_centers(c);
          const SteadyBranch* best = nullptr;
          for (const auto& br : branches) {
            if (!best || std::abs(-std::norm(br.beta) / delta - q2) < std::abs(-std::norm(best->beta) / delta - q2))
              best = &br;
          }
          const DstsShape f = to_dsts(steady_shape(best->beta, c).state);
          e_small = std::max({e_small, std::abs(f.r - std::abs(dk.xi)) / std::max(std::abs(dk.xi), 1e-3),
                              std::abs(f.n_th - dk.n_th) / std::max(dk.n_th, 1e-3)});
        }
      }
    }
    // Linear limit.
    {
      SimConfig c;
      c.kappa = 1.0;
      c.detuning = 0.7;
      c.drive = DriveSchedule::constant(complex{2.0, 0.5});
      const auto traj = evolve(HybridState::vacuum(), c, grid(8.0, 40), {1e-12, 1e-14});
      const complex lam{0.5, 0.7};
      const complex bss = complex{0.0, -1.0} * complex{2.0, 0.5} / lam;
      for (const auto& s : traj.samples) {
        e_lin = std::max({e_lin, std::abs(s.state.beta - bss * (1.0 - std::exp(-lam * s.t))),
                          std::abs(s.state.w1 - 1.0), std::abs(s.state.w2 - 1.0), std::abs(s.state.k)});
      }
    }
    const bool pass = e_phase < kEquivalence && e_fixed < kFixedPoint && e_mom < kMoments &&
                      e_small < kSmallDamping && e_lin < kLinear;
    rep.line(8, pass,
             "hybrid/phase " + fmt(e_phase, 2) + " (<1e-8); fixed point " + fmt(e_fixed, 2) +
                 " kappa (<1e-8); linearized moments " + fmt(e_mom, 2) + " over 100 sets (<1e-10); small damping " +
                 fmt(e_small, 2) + " (<1e-3); linear limit " + fmt(e_lin, 2) + " (<1e-9)");
  });

  guarded(rep, 9, [&] {
    const json s = read_json(fig4 / "summary.json");
    const double h = s["timing"]["hybrid_seconds"], o = s["timing"]["oracle_seconds"];
    rep.line(9, o / h > kSpeedupMin,
             "fig4 wall clock: hybrid " + fmt(h * 1e3, 3) + " ms, oracle " + fmt(o, 3) + " s, ratio " +
                 fmt(o / h, 3) + " (>1e3)");
  });

  std::cout << (rep.failures() == 0 ? "all criteria passed" : std::to_string(rep.failures()) + " criteria failed")
            << std::endl;
  return rep.failures() == 0 ? 0 : 1;
}
