#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

using namespace fpbh::cli;

int main(int argc, char** argv) {
  CLI::App app{"Four-point-bending piezoelectric harvester simulator"};
  app.set_version_flag("--version", FPBH_VERSION);
  app.require_subcommand(1);

  RunOptions opt;
  std::string format = "csv";
  std::size_t modes = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Design config (YAML or JSON)")->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--modes", modes, "Number of modes (overrides solver.modes)");
    sub->add_option("--grid", opt.grid, "Solver grid override key=value, e.g. load_grid.points=121");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunOptions&, std::ostream&);
  };
  const Entry entries[] = {
      {"modes", "Natural frequencies and modal coefficients", cmd_modes},
      {"impulse", "Peak voltage, deflection and strain per unit impact", cmd_impulse},
      {"sweep-load", "Peak power versus load resistance", cmd_sweep_load},
      {"sweep-kappa", "Lambda and FoM versus load span", cmd_sweep_kappa},
      {"sweep-theta", "Power density versus piezo length", cmd_sweep_theta},
      {"contour", "Strain field over the section (long format)", cmd_contour},
      {"compare", "Four-point bending versus cantilever", cmd_compare},
      {"verify", "Invariant and oracle checks; exit 3 on failure", cmd_verify},
      {"simulate", "Time-domain impulse response trajectory", cmd_simulate},
      {"calibrate", "Fit one layer thickness to a target first frequency", cmd_calibrate},
  };
  int (*chosen)(const RunOptions&, std::ostream&) = nullptr;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    if (std::string(e.name) == "impulse" || std::string(e.name) == "simulate") {
      sub->add_option("--impulse", opt.impulse, "Impulse magnitude F0 (N s)");
    }
    if (std::string(e.name) == "calibrate") {
      sub->add_option("--target-f1", opt.target_f1, "Target first frequency (Hz)")->capture_default_str();
      sub->add_option("--layer", opt.calibrate_layer, "Index of the layer whose thickness is fitted")
          ->capture_default_str();
    }
    sub->callback([&chosen, fn = e.fn] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  if (modes > 0) opt.modes = modes;
  opt.format = format == "json" ? Format::json : Format::csv;

  try {
    return chosen(opt, std::cout);
  } catch (const fpbh::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
