#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kerrsim/sim_config.hpp"

namespace kerrsim::cli {

enum class Mode { hybrid, lindblad, compare, steady, sweep };

std::optional<Mode> parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

/// Config rejected during parsing or validation. `field` is a JSON pointer
/// to the offending key (empty for syntax errors, which carry `line`).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, long line = 0);
  const std::string& field() const noexcept { return field_; }
  long line() const noexcept { return line_; }

 private:
  std::string field_;
  long line_;
};

struct SweepAxis {
  /// eps_tilde, delta_omega_tilde, n_b, drive (rad/s) or detuning (rad/s).
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
};

enum class InitialState { vacuum, thermal };

struct RunSpec {
  Mode mode = Mode::hybrid;
  std::string name = "run";
  SimConfig config;
  InitialState initial = InitialState::vacuum;
  double rtol = 1e-9;
  double atol = 1e-12;
  double oracle_rtol = 1e-8;
  /// Fixed RK4 step (s) for both integrators.
  std::optional<double> fixed_step;
  std::filesystem::path out_dir = ".";
  int workers = 1;
  /// Sweep mode: cartesian product of the axes, each point run as `sweep_mode`.
  std::vector<SweepAxis> sweep_axes;
  Mode sweep_mode = Mode::steady;
};

/// Frequency: number (rad/s) or "<v> <unit>" with unit Hz/kHz/MHz/GHz
/// (cyclic, multiplied by 2 pi) or rad/s.
double parse_frequency(const std::string& text);
/// Time: number (s), "<v> s|ms|us|ns", or "<v>/kappa".
double parse_time(const std::string& text, double kappa);
/// Temperature: number (K) or "<v> K|mK|uK".
double parse_temperature(const std::string& text);

/// Parses and validates JSON config text for `mode`. Throws ConfigError.
RunSpec validate_config(std::string_view raw, Mode mode);

/// Normalized JSON (rad/s, seconds, explicit n_b); parses back to an
/// identical RunSpec.
std::string canonical_config(const RunSpec& spec);

enum ExitCode : int { ok = 0, config_error = 2, numerical_failure = 3, truncation_overflow = 4 };

/// Executes the spec, writing CSV/JSON files under spec.out_dir. Errors are
/// reported on `log` and mapped to exit codes.
int run(const RunSpec& spec, std::ostream& log);

/// Full command line: simulate <mode> --config <file> --out <dir>
/// [--fixed-step <dt>] [--fock-dim <N>] [--workers <k>].
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Scientific notation with 12 significant digits, '.' decimal separator.
std::string format_double(double value);

}  // namespace kerrsim::cli
