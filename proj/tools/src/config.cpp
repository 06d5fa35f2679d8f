#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kerrsim/gaussian_state.hpp"
#include "kerrsim/units.hpp"
#include "kerrsim_cli/cli.hpp"

namespace kerrsim::cli {
namespace {

using json = nlohmann::ordered_json;

struct Unit {
  std::string_view name;
  double factor;
};

// Splits "<number> <unit>" (space optional); throws std::invalid_argument.
std::pair<double, std::string> split_quantity(const std::string& text) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number with unit, got '" + text + "'");
  }
  std::string unit = text.substr(pos);
  const auto first = unit.find_first_not_of(" \t");
  unit = first == std::string::npos ? "" : unit.substr(first);
  while (!unit.empty() && (unit.back() == ' ' || unit.back() == '\t')) unit.pop_back();
  return {value, unit};
}

double with_unit(const std::string& text, std::initializer_list<Unit> units, const char* kind) {
  const auto [value, unit] = split_quantity(text);
  for (const Unit& u : units) {
    if (unit == u.name) return value * u.factor;
  }
  std::string names;
  for (const Unit& u : units) names += (names.empty() ? "" : ", ") + std::string(u.name);
  throw std::invalid_argument(std::string("unknown ") + kind + " unit '" + unit + "' (use " +
                              names + ")");
}

class Parser {
 public:
  explicit Parser(Mode mode) : mode_(mode) {}

  RunSpec parse(const json& root) {
    if (!root.is_object()) throw ConfigError("", "top level must be a JSON object");
    check_keys(root, "",
               {"name", "description", "kappa", "detuning", "delta_omega_tilde", "omega_r0",
                "nonlinearity", "drive", "n_b", "T_b", "t_final", "dt_out", "fock_dim",
                "initial", "tolerances", "sweep"});
    RunSpec spec;
    spec.mode = mode_;
    if (root.contains("name")) spec.name = string_at(root, "name", "/name");
    if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos) {
      throw ConfigError("/name", "must be a non-empty file-name-safe string");
    }
    SimConfig& c = spec.config;
    c.kappa = frequency_at(root, "kappa", "/kappa", true);
    if (!(c.kappa > 0.0)) throw ConfigError("/kappa", "must be positive");
    if (root.contains("omega_r0")) {
      c.omega_r0 = frequency_at(root, "omega_r0", "/omega_r0", true);
      if (!(*c.omega_r0 > 0.0)) throw ConfigError("/omega_r0", "must be positive");
    }
    parse_nonlinearity(root, c);
    parse_detuning(root, c);
    parse_drive(root, c);
    parse_bath(root, c);

    const bool needs_time = mode_ == Mode::hybrid || mode_ == Mode::lindblad ||
                            mode_ == Mode::compare;
    if (root.contains("t_final")) c.t_final = time_at(root, "t_final", "/t_final", c.kappa);
    if (root.contains("dt_out")) c.dt_out = time_at(root, "dt_out", "/dt_out", c.kappa);
    if (needs_time && !(c.t_final > 0.0)) {
      throw ConfigError("/t_final", "required and positive for mode " + std::string(to_string(mode_)));
    }
    if (c.t_final < 0.0) throw ConfigError("/t_final", "must be nonnegative");
    if (c.dt_out < 0.0) throw ConfigError("/dt_out", "must be nonnegative");
    if (root.contains("fock_dim")) {
      const json& f = root.at("fock_dim");
      if (!f.is_number_integer() || f.get<long>() < 0 || f.get<long>() == 1) {
        throw ConfigError("/fock_dim", "must be 0 (automatic) or an integer >= 2");
      }
      c.fock_dim = f.get<long>();
    }
    if (root.contains("initial")) {
      const std::string s = string_at(root, "initial", "/initial");
      if (s == "vacuum") spec.initial = InitialState::vacuum;
      else if (s == "thermal") spec.initial = InitialState::thermal;
      else throw ConfigError("/initial", "must be \"vacuum\" or \"thermal\"");
    }
    if (root.contains("tolerances")) parse_tolerances(root.at("tolerances"), spec);
    if (root.contains("sweep")) parse_sweep(root.at("sweep"), spec);
    if (mode_ == Mode::sweep && spec.sweep_axes.empty()) {
      throw ConfigError("/sweep", "sweep mode requires a sweep block with axes");
    }
    if (mode_ == Mode::steady || (mode_ == Mode::sweep && spec.sweep_mode == Mode::steady)) {
      if (!c.nonlinearity.kerr_eta()) throw ConfigError("/nonlinearity", "steady analytics need a Kerr model");
      if (c.drive.segments().size() > 1) throw ConfigError("/drive", "steady analytics need a constant drive");
    }
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      throw ConfigError("/" + what.substr(0, what.find(':')), what);
    }
    return spec;
  }

 private:
  Mode mode_;

  static void check_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
      bool ok = false;
      for (std::string_view a : allowed) ok = ok || item.key() == a;
      if (!ok) throw ConfigError(path + "/" + item.key(), "unknown key");
    }
  }

  static std::string string_at(const json& obj, const char* key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(path, "must be a string");
    return v.get<std::string>();
  }

  static double number_at(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) throw ConfigError(path, "required");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
  }

  template <class F>
  static double quantity(const json& v, const std::string& path, F&& parse_text) {
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
      return x;
    }
    if (!v.is_string()) throw ConfigError(path, "must be a number or a string with unit");
    try {
      return parse_text(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
  }

  static double frequency_at(const json& obj, const char* key, const std::string& path,
                             bool required) {
    if (!obj.contains(key)) {
      if (required) throw ConfigError(path, "required");
      return 0.0;
    }
    return quantity(obj.at(key), path, [](const std::string& s) { return parse_frequency(s); });
  }

  static double time_at(const json& obj, const char* key, const std::string& path, double kappa) {
    return quantity(obj.at(key), path, [kappa](const std::string& s) { return parse_time(s, kappa); });
  }

  void parse_nonlinearity(const json& root, SimConfig& c) {
    if (!root.contains("nonlinearity")) {
      c.nonlinearity = NonlinearityModel::kerr(0.0);
      return;
    }
    const json& nl = root.at("nonlinearity");
    if (!nl.is_object()) throw ConfigError("/nonlinearity", "must be an object");
    check_keys(nl, "/nonlinearity", {"model", "eta"});
    const std::string model = nl.contains("model") ? string_at(nl, "model", "/nonlinearity/model") : "kerr";
    if (model != "kerr") throw ConfigError("/nonlinearity/model", "only \"kerr\" is supported");
    c.nonlinearity = NonlinearityModel::kerr(frequency_at(nl, "eta", "/nonlinearity/eta", true));
  }

  void parse_detuning(const json& root, SimConfig& c) {
    const bool has_d = root.contains("detuning");
    const bool has_t = root.contains("delta_omega_tilde");
    if (has_d && has_t) throw ConfigError("/delta_omega_tilde", "give either detuning or delta_omega_tilde");
    if (has_d) c.detuning = frequency_at(root, "detuning", "/detuning", true);
    if (has_t) {
      const double eta = c.nonlinearity.kerr_eta().value_or(0.0);
      if (eta == 0.0) throw ConfigError("/delta_omega_tilde", "needs a nonzero Kerr eta");
      const double dw = number_at(root, "delta_omega_tilde", "/delta_omega_tilde");
      c.detuning = -(eta < 0.0 ? -1.0 : 1.0) * dw * c.kappa;
    }
  }

  complex amplitude_of(const json& v, const std::string& path, const SimConfig& c) {
    if (v.is_number() || v.is_string()) {
      return quantity(v, path, [](const std::string& s) { return parse_frequency(s); });
    }
    if (!v.is_object()) throw ConfigError(path, "must be a number, string or object");
    check_keys(v, path, {"amplitude", "phase", "eps_tilde", "re", "im", "t_start"});
    if (v.contains("re") || v.contains("im")) {
      return {number_at(v, "re", path + "/re"), number_at(v, "im", path + "/im")};
    }
    double mag = 0.0;
    if (v.contains("eps_tilde")) {
      const double eta = c.nonlinearity.kerr_eta().value_or(0.0);
      if (eta == 0.0) throw ConfigError(path + "/eps_tilde", "needs a nonzero Kerr eta");
      const double e = number_at(v, "eps_tilde", path + "/eps_tilde");
      if (e < 0.0) throw ConfigError(path + "/eps_tilde", "must be nonnegative");
      mag = e * c.kappa * std::sqrt(c.kappa) / std::sqrt(std::abs(eta));
    } else {
      mag = frequency_at(v, "amplitude", path + "/amplitude", true);
    }
    const double phase = v.contains("phase") ? number_at(v, "phase", path + "/phase") : 0.0;
    return std::polar(mag, phase);
  }

  void parse_drive(const json& root, SimConfig& c) {
    if (!root.contains("drive")) {
      c.drive = DriveSchedule::constant(0.0);
      return;
    }
    const json& d = root.at("drive");
    if (d.is_object() && d.contains("segments")) {
      check_keys(d, "/drive", {"segments"});
      const json& segs = d.at("segments");
      if (!segs.is_array() || segs.empty()) throw ConfigError("/drive/segments", "must be a non-empty array");
      std::vector<DriveSchedule::Segment> out;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string p = "/drive/segments/" + std::to_string(i);
        const json& s = segs[i];
        if (!s.is_object()) throw ConfigError(p, "must be an object");
        const double t0 = s.contains("t_start") ? time_at(s, "t_start", p + "/t_start", c.kappa) : 0.0;
        if (i == 0 && t0 != 0.0) throw ConfigError(p + "/t_start", "first segment must start at 0");
        if (i > 0 && !(t0 > out.back().t_start)) throw ConfigError(p + "/t_start", "segment starts must increase");
        out.push_back({t0, amplitude_of(s, p, c)});
      }
      c.drive = DriveSchedule(std::move(out));
      return;
    }
    c.drive = DriveSchedule::constant(amplitude_of(d, "/drive", c));
  }

  void parse_bath(const json& root, SimConfig& c) {
    if (root.contains("n_b") && root.contains("T_b")) throw ConfigError("/T_b", "give either n_b or T_b");
    if (root.contains("n_b")) {
      c.n_b = number_at(root, "n_b", "/n_b");
      if (c.n_b < 0.0) throw ConfigError("/n_b", "must be nonnegative");
    } else if (root.contains("T_b")) {
      if (!c.omega_r0) throw ConfigError("/T_b", "needs omega_r0 to convert to n_b");
      const double t = quantity(root.at("T_b"), "/T_b", [](const std::string& s) { return parse_temperature(s); });
      if (t < 0.0) throw ConfigError("/T_b", "must be nonnegative");
      c.n_b = occupation_from_temperature(units::rad_per_s_from_kelvin(t), *c.omega_r0);
    }
  }

  void parse_tolerances(const json& t, RunSpec& spec) {
    if (!t.is_object()) throw ConfigError("/tolerances", "must be an object");
    check_keys(t, "/tolerances", {"rtol", "atol", "oracle_rtol"});
    auto positive = [&](const char* key, double& dst) {
      if (!t.contains(key)) return;
      dst = number_at(t, key, std::string("/tolerances/") + key);
      if (!(dst > 0.0)) throw ConfigError(std::string("/tolerances/") + key, "must be positive");
    };
    positive("rtol", spec.rtol);
    positive("atol", spec.atol);
    positive("oracle_rtol", spec.oracle_rtol);
  }

  void parse_sweep(const json& s, RunSpec& spec) {
    if (!s.is_object()) throw ConfigError("/sweep", "must be an object");
    check_keys(s, "/sweep", {"mode", "axes"});
    if (s.contains("mode")) {
      const std::string m = string_at(s, "mode", "/sweep/mode");
      if (m == "steady") spec.sweep_mode = Mode::steady;
      else if (m == "hybrid") spec.sweep_mode = Mode::hybrid;
      else throw ConfigError("/sweep/mode", "must be \"steady\" or \"hybrid\"");
    }
    if (spec.sweep_mode == Mode::hybrid && !(spec.config.t_final > 0.0)) {
      throw ConfigError("/t_final", "hybrid sweeps need a positive t_final");
    }
    if (!s.contains("axes") || !s.at("axes").is_array() || s.at("axes").empty()) {
      throw ConfigError("/sweep/axes", "must be a non-empty array");
    }
    const json& axes = s.at("axes");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const std::string p = "/sweep/axes/" + std::to_string(i);
      const json& a = axes[i];
      if (!a.is_object()) throw ConfigError(p, "must be an object");
      check_keys(a, p, {"parameter", "start", "stop", "count"});
      SweepAxis ax;
      ax.parameter = string_at(a, "parameter", p + "/parameter");
      static const std::set<std::string> known{"eps_tilde", "delta_omega_tilde", "n_b", "drive",
                                               "detuning"};
      if (!known.count(ax.parameter)) {
        throw ConfigError(p + "/parameter",
                          "unknown sweep parameter (eps_tilde, delta_omega_tilde, n_b, drive, detuning)");
      }
      ax.start = number_at(a, "start", p + "/start");
      ax.stop = number_at(a, "stop", p + "/stop");
      if (!a.contains("count") || !a.at("count").is_number_integer() || a.at("count").get<int>() < 1) {
        throw ConfigError(p + "/count", "must be a positive integer");
      }
      ax.count = a.at("count").get<int>();
      if ((ax.parameter == "eps_tilde" || ax.parameter == "delta_omega_tilde") &&
          spec.config.nonlinearity.kerr_eta().value_or(0.0) == 0.0) {
        throw ConfigError(p + "/parameter", "dimensionless sweeps need a nonzero Kerr eta");
      }
      if ((ax.parameter == "n_b" || ax.parameter == "eps_tilde") && std::min(ax.start, ax.stop) < 0.0) {
        throw ConfigError(p + "/start", "must be nonnegative for " + ax.parameter);
      }
      spec.sweep_axes.push_back(ax);
    }
  }
};

long line_of_offset(std::string_view raw, std::size_t offset) {
  long line = 1;
  for (std::size_t i = 0; i < raw.size() && i < offset; ++i) line += raw[i] == '\n';
  return line;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message, long line)
    : std::runtime_error((field.empty() ? std::string() : field + ": ") + message +
                         (line > 0 ? " (line " + std::to_string(line) + ")" : "")),
      field_(std::move(field)),
      line_(line) {}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "hybrid") return Mode::hybrid;
  if (name == "lindblad") return Mode::lindblad;
  if (name == "compare") return Mode::compare;
  if (name == "steady") return Mode::steady;
  if (name == "sweep") return Mode::sweep;
  return std::nullopt;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::hybrid: return "hybrid";
    case Mode::lindblad: return "lindblad";
    case Mode::compare: return "compare";
    case Mode::steady: return "steady";
    case Mode::sweep: return "sweep";
  }
  return "hybrid";
}

double parse_frequency(const std::string& text) {
  constexpr double tp = 2.0 * std::numbers::pi;
  return with_unit(text,
                   {{"Hz", tp}, {"kHz", tp * 1e3}, {"MHz", tp * 1e6}, {"GHz", tp * 1e9},
                    {"rad/s", 1.0}, {"", 1.0}},
                   "frequency");
}

double parse_time(const std::string& text, double kappa) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string rest = text.substr(slash + 1);
    rest.erase(0, rest.find_first_not_of(' '));
    if (rest != "kappa") throw std::invalid_argument("time must be '<v>/kappa' or '<v> <unit>'");
    const auto [value, unit] = split_quantity(text.substr(0, slash));
    if (!unit.empty()) throw std::invalid_argument("malformed time '" + text + "'");
    return value / kappa;
  }
  return with_unit(text, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"", 1.0}}, "time");
}

double parse_temperature(const std::string& text) {
  return with_unit(text, {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}, {"", 1.0}}, "temperature");
}

RunSpec validate_config(std::string_view raw, Mode mode) {
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON syntax error: ") + e.what(),
                      line_of_offset(raw, e.byte == 0 ? 0 : e.byte - 1));
  }
  return Parser(mode).parse(root);
}

std::string canonical_config(const RunSpec& spec) {
  const SimConfig& c = spec.config;
  json j;
  j["name"] = spec.name;
  j["kappa"] = c.kappa;
  j["detuning"] = c.detuning;
  if (c.omega_r0) j["omega_r0"] = *c.omega_r0;
  j["nonlinearity"] = {{"model", "kerr"}, {"eta", c.nonlinearity.kerr_eta().value_or(0.0)}};
  json segs = json::array();
  for (const auto& s : c.drive.segments()) {
    segs.push_back({{"t_start", s.t_start}, {"re", s.amplitude.real()}, {"im", s.amplitude.imag()}});
  }
  j["drive"] = {{"segments", segs}};
  j["n_b"] = c.n_b;
  j["t_final"] = c.t_final;
  j["dt_out"] = c.dt_out;
  j["fock_dim"] = c.fock_dim;
  j["initial"] = spec.initial == InitialState::vacuum ? "vacuum" : "thermal";
  j["tolerances"] = {{"rtol", spec.rtol}, {"atol", spec.atol}, {"oracle_rtol", spec.oracle_rtol}};
  if (!spec.sweep_axes.empty()) {
    json axes = json::array();
    for (const SweepAxis& a : spec.sweep_axes) {
      axes.push_back({{"parameter", a.parameter}, {"start", a.start}, {"stop", a.stop}, {"count", a.count}});
    }
    j["sweep"] = {{"mode", std::string(to_string(spec.sweep_mode))}, {"axes", axes}};
  }
  return j.dump(2) + "\n";
}

}  // namespace kerrsim::cli
