#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace fpbh::cli {

enum class Format { csv, json };

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2, kVerification = 3 };

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::size_t> modes;
  std::vector<std::string> grid;  // solver overrides "key=value", e.g. "load_grid.points=121"
  Format format = Format::csv;
  std::optional<double> impulse;  // N s
  double target_f1 = 48.4;        // Hz
  std::size_t calibrate_layer = 0;
};

/// Config with --modes and --grid overrides applied.
DesignConfig resolve_config(const RunOptions& opt);
DesignConfig apply_overrides(const DesignConfig& base, const RunOptions& opt);

int cmd_modes(const RunOptions& opt, std::ostream& log);
int cmd_impulse(const RunOptions& opt, std::ostream& log);
int cmd_sweep_load(const RunOptions& opt, std::ostream& log);
int cmd_sweep_kappa(const RunOptions& opt, std::ostream& log);
int cmd_sweep_theta(const RunOptions& opt, std::ostream& log);
int cmd_contour(const RunOptions& opt, std::ostream& log);
int cmd_compare(const RunOptions& opt, std::ostream& log);
int cmd_verify(const RunOptions& opt, std::ostream& log);
int cmd_simulate(const RunOptions& opt, std::ostream& log);
int cmd_calibrate(const RunOptions& opt, std::ostream& log);

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

/// Invariant and oracle-equivalence checks on one config.
std::vector<Check> verification_checks(const DesignConfig& cfg);

/// Thickness of layer `layer` that puts the first natural frequency at `f1` (Hz).
double calibrate_thickness(const DesignConfig& cfg, std::size_t layer, double f1);

}  // namespace fpbh::cli
