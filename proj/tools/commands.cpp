#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "csv.hpp"
#include "fpbh/time_domain.hpp"

#ifndef FPBH_VERSION
#define FPBH_VERSION "0.0.0"
#endif

namespace fpbh::cli {

using nlohmann::json;

namespace {

json override_value(const std::string& text) {
  if (text.find(',') != std::string::npos) {
    json a = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) a.push_back(override_value(item));
    return a;
  }
  double d = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ec == std::errc() && p == text.data() + text.size()) return d;
  return text;
}

json grids_json(const DesignConfig& c) {
  const auto& s = c.solver;
  return {{"modes", s.modes},
          {"psi_form", to_string(s.psi_form)},
          {"space_points", s.space_points},
          {"z_points", s.z_points},
          {"load_grid", {{"min", s.load_grid.min}, {"max", s.load_grid.max}, {"points", s.load_grid.points}}},
          {"kappa_grid", {{"min", s.kappa_grid.min}, {"max", s.kappa_grid.max}, {"points", s.kappa_grid.points}}},
          {"theta_grid", s.theta_grid},
          {"span_grid", {{"min", s.span_grid.min}, {"max", s.span_grid.max}, {"points", s.span_grid.points}}},
          {"threshold", s.threshold}};
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

// Writes <stem>.csv or <stem>.json plus <stem>.manifest.json.
void emit(const RunOptions& opt, const DesignConfig& cfg, const std::string& command, const std::string& stem,
          const Table& t, const json& summary = json::object()) {
  std::filesystem::create_directories(opt.out);
  const std::string file = stem + (opt.format == Format::csv ? ".csv" : ".json");
  {
    auto f = open_out(opt.out / file);
    if (opt.format == Format::csv) {
      write_csv(f, t);
    } else {
      json j = table_json(t);
      if (!summary.empty()) j["summary"] = summary;
      f << j.dump(2) << '\n';
    }
  }
  json m{{"tool", "fpbh"},
         {"version", FPBH_VERSION},
         {"command", command},
         {"config_name", cfg.name},
         {"config_hash", hex(config_hash(cfg))},
         {"grids", grids_json(cfg)},
         {"outputs", json::array({file})}};
  if (!summary.empty()) m["summary"] = summary;
  auto f = open_out(opt.out / (stem + ".manifest.json"));
  f << m.dump(2) << '\n';
}

double impulse_of(const RunOptions& opt, const DesignConfig& cfg) { return opt.impulse ? *opt.impulse : cfg.solver.impulse; }

MetricsOptions metrics_options(const DesignConfig& cfg) {
  MetricsOptions mo;
  mo.peak = cfg.peak_options();
  mo.loads = cfg.solver.load_grid;
  return mo;
}

}  // namespace

DesignConfig apply_overrides(const DesignConfig& base, const RunOptions& opt) {
  if (!opt.modes && opt.grid.empty()) return base;
  json j = config_to_json(base);
  if (opt.modes) j["solver"]["modes"] = *opt.modes;
  for (const auto& g : opt.grid) {
    const auto eq = g.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--grid", "expected key=value, got '" + g + "'");
    json* node = &j["solver"];
    std::stringstream ss(g.substr(0, eq));
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->contains(parts[i])) throw ValidationError("solver." + g.substr(0, eq), "unknown grid setting");
      node = &(*node)[parts[i]];
    }
    if (!node->is_object()) throw ValidationError("solver." + g.substr(0, eq), "unknown grid setting");
    (*node)[parts.back()] = override_value(g.substr(eq + 1));
  }
  return config_from_json(j);
}

DesignConfig resolve_config(const RunOptions& opt) {
  if (opt.config.empty()) throw ValidationError("--config", "no config file given");
  return apply_overrides(load_config(opt.config), opt);
}

int cmd_modes(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto model = cfg.build_model();
  Table t;
  t.columns = {"n [-]", "f [Hz]", "omega [rad/s]", "zeta [-]", "sigma [m^-0.5]", "gamma [m^0.5/(V s^2)]",
               "Lambda [C m^-1.5]"};
  for (std::size_t n = 1; n <= model.mode_count(); ++n) {
    const auto& m = model.basis().mode(n);
    t.add({static_cast<double>(n), m.omega / (2.0 * kPi), m.omega, m.zeta, m.sigma, m.gamma, m.lambda});
    log << "mode " << n << ": f = " << format_double(m.omega / (2.0 * kPi)) << " Hz\n";
  }
  emit(opt, cfg, "modes", "modes", t);
  return kOk;
}

int cmd_impulse(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto model = cfg.build_model();
  const double F0 = impulse_of(opt, cfg);
  const auto p = impulse_peak_estimates(model, F0, cfg.peak_options());
  auto mo = metrics_options(cfg);
  mo.with_power = false;
  const auto pm = lambda_and_fom(model, mo);
  Table t;
  t.columns = {"kappa [-]", "R_L [Ohm]", "V_peak [V/N]", "w_max [m/N]", "eps_max [1/N]", "V_oc [V/N]",
               "eps_oc [1/N]", "lambda [V]", "FoM [V]"};
  const double k = std::get<FpbGeometry>(model.geometry()).kappa();
  t.add({k, cfg.circuit.load_resistance, p.voltage / F0, p.deflection / F0, p.strain / F0, pm.open_circuit_voltage,
         pm.max_strain, pm.lambda, pm.fom});
  log << "V_peak = " << format_double(p.voltage / F0) << " V/N, w_max = " << format_double(p.deflection / F0)
      << " m/N, eps_max = " << format_double(p.strain / F0) << " 1/N\n";
  emit(opt, cfg, "impulse", "impulse", t, {{"impulse", F0}});
  return kOk;
}

int cmd_sweep_load(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto c = power_vs_load(cfg.build_model(), cfg.solver.load_grid, cfg.peak_options());
  Table t;
  t.columns = {"R_L [Ohm]", "V [V/N]", "I [A/N]", "P [W/N^2]"};
  for (const auto& p : c.points) t.add({p.load, p.voltage, p.current, p.power});
  log << "R_opt = " << format_double(c.optimal_load) << " Ohm, P_peak = " << format_double(c.peak_power)
      << " W/N^2\n";
  emit(opt, cfg, "sweep-load", "sweep_load", t, {{"optimal_load", c.optimal_load}, {"peak_power", c.peak_power}});
  return kOk;
}

int cmd_sweep_kappa(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto s = sweep_kappa(cfg.build_model(), cfg.solver.kappa_grid.values(), metrics_options(cfg));
  Table t;
  t.columns = {"kappa [-]",   "V_oc [V/N]",  "eps_max [1/N]",   "lambda [V]",       "FoM [V]",
               "R_opt [Ohm]", "P_peak [W/N^2]", "w_max [m/N]", "stress_max [Pa/N]"};
  for (const auto& p : s) {
    const auto& m = p.metrics;
    t.add({p.kappa, m.open_circuit_voltage, m.max_strain, m.lambda, m.fom, m.optimal_load, m.peak_power,
           m.max_deflection, m.max_stress});
  }
  const auto b = best_fom(s);
  log << "best FoM at kappa = " << format_double(s[b].kappa) << "\n";
  emit(opt, cfg, "sweep-kappa", "sweep_kappa", t, {{"best_fom_kappa", s[b].kappa}});
  return kOk;
}

int cmd_sweep_theta(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto s =
      sweep_theta(cfg.build_model(), cfg.build_damping(), cfg.solver.theta_grid, cfg.solver.load_grid, cfg.peak_options());
  Table t;
  t.columns = {"theta [-]", "R_opt [Ohm]", "P_peak [W/N^2]", "power_density [W/(N^2 m^3)]"};
  for (const auto& p : s) t.add({p.theta, p.optimal_load, p.peak_power, p.power_density});
  log << s.size() << " theta points\n";
  emit(opt, cfg, "sweep-theta", "sweep_theta", t);
  return kOk;
}

int cmd_contour(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto model = cfg.build_model();
  const auto oc = model.with_effective_resistance(kOpenCircuitResistance);
  const auto p = impulse_peak_estimates(oc, 1.0, cfg.peak_options());
  const CurvatureSnapshot snap(model.basis(), p.modal, cfg.solver.space_points);
  const auto f = strain_field(model, snap, {cfg.solver.space_points, cfg.solver.z_points, GridKind::nodes});
  Table t;
  t.columns = {"xi [-]", "z [m]", "layer [-]", "eps_xx [1/N]"};
  const auto layers = model.laminate().layers();
  for (std::size_t i = 0; i < f.z.size(); ++i)
    for (std::size_t j = 0; j < f.xi.size(); ++j)
      t.add({f.xi[j], f.z[i], layers[f.layer[i]].name.empty() ? std::to_string(f.layer[i]) : layers[f.layer[i]].name,
             f.at(i, j)});
  const double af = active_volume_fraction(model, cfg.solver.threshold, cfg.peak_options(),
                                           {cfg.solver.space_points, cfg.solver.z_points, GridKind::cells});
  log << "active piezo volume at " << format_double(cfg.solver.threshold) << " of max: " << format_double(af) << "\n";
  json summary{{"active_volume_fraction", af}, {"threshold", cfg.solver.threshold}};
  if (cfg.cantilever) {
    const double ac = active_volume_fraction(cfg.build_cantilever(), cfg.solver.threshold, cfg.peak_options(),
                                             {cfg.solver.space_points, cfg.solver.z_points, GridKind::cells});
    summary["cantilever_active_volume_fraction"] = ac;
    log << "cantilever active piezo volume: " << format_double(ac) << "\n";
  }
  emit(opt, cfg, "contour", "contour", t, summary);
  return kOk;
}

int cmd_compare(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto s = compare_cantilever(cfg.build_model(), cfg.build_cantilever(), cfg.solver.span_grid.values(),
                                    cfg.peak_options());
  Table t;
  t.columns = {"span [-]",        "fpb_V_oc [V/N]",        "fpb_eps_max [1/N]", "fpb_stress [Pa/N]",
               "fpb_lambda [V]",  "cant_V_oc [V/N]",       "cant_eps_max [1/N]", "cant_stress [Pa/N]",
               "cant_lambda [V]"};
  for (const auto& r : s.rows)
    t.add({r.span, r.fpb.voltage, r.fpb.strain, r.fpb.stress, r.fpb.lambda, r.cantilever.voltage,
           r.cantilever.strain, r.cantilever.stress, r.cantilever.lambda});
  const auto& fb = s.rows[s.fpb_best_lambda];
  const auto& cb = s.rows[s.cantilever_best_voltage];
  json summary{{"fpb_best_lambda_span", fb.span},
               {"fpb_best_lambda", fb.fpb.lambda},
               {"cantilever_best_voltage_span", cb.span},
               {"cantilever_lambda", cb.cantilever.lambda},
               {"stress_ratio", cb.cantilever.stress / s.rows[s.fpb_best_voltage].fpb.stress}};
  log << "lambda FPB / cantilever = " << format_double(fb.fpb.lambda / cb.cantilever.lambda) << "\n";
  emit(opt, cfg, "compare", "compare", t, summary);
  return kOk;
}

int cmd_simulate(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto model = cfg.build_model();
  const double F0 = impulse_of(opt, cfg);
  const double dt = cfg.solver.time_step ? *cfg.solver.time_step : recommended_time_step(model);
  const ForceSignal force = Impulse{F0, 0.0};
  const auto tr = integrate(model, force, cfg.solver.t_end, dt);
  const auto audit = energy_audit(tr, model, force);
  std::filesystem::create_directories(opt.out);
  const std::string file = opt.format == Format::csv ? "trajectory.csv" : "trajectory.json";
  {
    auto f = open_out(opt.out / file);
    if (opt.format == Format::csv) {
      CsvWriter w(f);
      write_trajectory(w, tr);
    } else {
      json j{{"t", tr.time}, {"V_R", tr.voltage}, {"modal", tr.modal}, {"mode_count", tr.mode_count}};
      f << j.dump() << '\n';
    }
  }
  json summary{{"peak_voltage", tr.peak_voltage()}, {"time_step", dt},  {"t_end", cfg.solver.t_end},
               {"work_in", audit.input},           {"work_R", audit.electrical}, {"energy_residual", audit.residual()}};
  json m{{"tool", "fpbh"},   {"version", FPBH_VERSION}, {"command", "simulate"}, {"config_name", cfg.name},
         {"config_hash", hex(config_hash(cfg))}, {"grids", grids_json(cfg)}, {"outputs", json::array({file})},
         {"summary", summary}};
  auto f = open_out(opt.out / "trajectory.manifest.json");
  f << m.dump(2) << '\n';
  log << "peak V_R = " << format_double(tr.peak_voltage()) << " V, energy residual = " << format_double(audit.residual())
      << "\n";
  return kOk;
}

double calibrate_thickness(const DesignConfig& cfg, std::size_t layer, double f1) {
  if (layer >= cfg.laminate.layers.size())
    throw ValidationError("--layer", "layer index " + std::to_string(layer) + " out of range");
  if (!(f1 > 0.0)) throw ValidationError("--target-f1", "must be positive");
  auto freq = [&](double h) {
    auto c = cfg;
    c.laminate.layers[layer].thickness = h;
    const auto lam = c.build_laminate();
    const double LT = c.geometry.total_length;
    return (kPi / LT) * (kPi / LT) * std::sqrt(lam.bending_stiffness() / lam.mass_per_length()) / (2.0 * kPi);
  };
  // f1 grows monotonically with the thickness of any layer in a thin stack; bracket then bisect in log h.
  double lo = 1e-7, hi = 1e-2;
  if ((freq(lo) - f1) * (freq(hi) - f1) > 0.0)
    throw ValidationError("--target-f1", "target not reachable by varying layer " + std::to_string(layer));
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-15; ++i) {
    const double mid = std::sqrt(lo * hi);
    if ((freq(mid) - f1) * (freq(lo) - f1) > 0.0) lo = mid;
    else hi = mid;
  }
  return std::sqrt(lo * hi);
}

int cmd_calibrate(const RunOptions& opt, std::ostream& log) {
  auto cfg = resolve_config(opt);
  const double h = calibrate_thickness(cfg, opt.calibrate_layer, opt.target_f1);
  cfg.laminate.layers[opt.calibrate_layer].thickness = h;
  cfg.validate();
  std::filesystem::create_directories(opt.out);
  const std::string file = opt.format == Format::csv ? "calibrated.yaml" : "calibrated.json";
  {
    auto f = open_out(opt.out / file);
    f << (opt.format == Format::csv ? to_yaml(cfg) : to_json_text(cfg));
  }
  const double f1 = cfg.build_model().basis().mode(1).omega / (2.0 * kPi);
  json summary{{"layer", opt.calibrate_layer}, {"thickness", h}, {"target_f1", opt.target_f1}, {"f1", f1}};
  json m{{"tool", "fpbh"},   {"version", FPBH_VERSION}, {"command", "calibrate"}, {"config_name", cfg.name},
         {"config_hash", hex(config_hash(cfg))}, {"grids", grids_json(cfg)}, {"outputs", json::array({file})},
         {"summary", summary}};
  {
    auto f = open_out(opt.out / "calibrated.manifest.json");
    f << m.dump(2) << '\n';
  }
  log << "layer " << opt.calibrate_layer << " thickness = " << format_double(h) << " m, f1 = " << format_double(f1)
      << " Hz\n";
  return kOk;
}

std::vector<Check> verification_checks(const DesignConfig& cfg) {
  std::vector<Check> out;
  auto add = [&](std::string name, double value, double limit) {
    out.push_back({std::move(name), value, limit, std::isfinite(value) && value <= limit});
  };
  const auto model = cfg.build_model();
  const auto& basis = model.basis();
  const std::size_t N = model.mode_count();
  const double L = model.length();

  double law = 0.0;
  for (std::size_t n = 1; n <= N; ++n)
    law = std::max(law, std::abs(basis.mode(n).omega / basis.mode(1).omega / static_cast<double>(n * n) - 1.0));
  add("frequency n^2 law", law, 1e-12);

  // Composite Simpson on 2000 panels.
  double ortho = 0.0;
  const std::size_t P = 2000;
  for (std::size_t a = 1; a <= N; ++a)
    for (std::size_t b = a; b <= N; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i <= P; ++i) {
        const double x = L * static_cast<double>(i) / P;
        const double w = (i == 0 || i == P) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * basis.shape(a, x) * basis.shape(b, x);
      }
      s *= L / P / 3.0;
      ortho = std::max(ortho, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  add("mode orthonormality", ortho, 1e-8);

  {
    auto g = FpbGeometry::symmetric(L, std::get<FpbGeometry>(model.geometry()).kappa(), 1.0);
    const auto full = fpb_basis(g, model.laminate(), cfg.build_damping(), std::max<std::size_t>(N, 4));
    const auto& m1 = full.mode(1);
    double worst = 0.0;
    for (std::size_t n = 2; n <= full.size(); n += 2) {
      const auto& m = full.mode(n);
      worst = std::max({worst, std::abs(m.sigma / m1.sigma), std::abs(m.gamma / m1.gamma),
                        std::abs(m.lambda / m1.lambda)});
    }
    add("even-mode decoupling", worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (double f : {0.5, 1.0, 1.7}) {
      const double w = f * basis.mode(1).omega;
      const Complex F(0.3, -0.7);
      const auto r = harmonic_response(model, w, F);
      for (std::size_t n = 1; n <= N; ++n) {
        const auto& m = basis.mode(n);
        const Complex lhs = (m.omega * m.omega - w * w + Complex(0.0, 2.0 * m.zeta * m.omega * w)) * r.modal[n - 1] +
                            m.gamma * r.voltage;
        const Complex rhs = m.sigma * F / model.mass_per_length();
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs == 0.0 ? Complex(1.0) : rhs));
      }
      Complex cur = 0.0;
      for (std::size_t n = 1; n <= N; ++n) cur += basis.mode(n).lambda * Complex(0.0, w) * r.modal[n - 1];
      const Complex lhs =
          (1.0 / model.effective_resistance() + Complex(0.0, w * model.effective_capacitance())) * r.voltage;
      worst = std::max(worst, std::abs(lhs - cur) / std::abs(cur));
    }
    add("harmonic residual", worst, 1e-10);
  }

  {
    double worst = 0.0;
    const double w1 = basis.mode(1).omega;
    for (double R : {1e3, kOpenCircuitResistance / 10.0})
      for (double f : {0.5, 1.0}) {
        const auto m = model.with_effective_resistance(R);
        const double fd = std::abs(psi(m, f * w1));
        const double td = simulated_harmonic_voltage(m, f * w1);
        worst = std::max(worst, std::abs(td / fd - 1.0));
      }
    add("harmonic voltage vs time-domain", worst, 0.01);
  }

  {
    const ForceSignal imp = Impulse{1.0, 0.0};
    const auto tr = integrate(model, imp, 0.25, recommended_time_step(model), {16, 2.0});
    const auto a = energy_audit(tr, model, imp);
    add("energy residual (impulse)", std::abs(a.residual()), 0.01);
    add("passivity W_R - W_in", (a.electrical - a.input) / a.input, 1e-6);
  }

  {
    const auto p = impulse_peak_estimates(model, 1.0, cfg.peak_options());
    const CurvatureSnapshot snap(basis, p.modal);
    const std::size_t G = 2000;
    const double h = L / G;
    double worst = 0.0, scale = 0.0;
    // Fourth-order central stencil on the node grid.
    auto w = [&](std::size_t i) { return snap.deflection_at(std::min(h * static_cast<double>(i), L)); };
    for (std::size_t i = 2; i + 2 <= G; ++i) {
      const double x = h * static_cast<double>(i);
      const double fd = (-w(i + 2) + 16.0 * w(i + 1) - 30.0 * w(i) + 16.0 * w(i - 1) - w(i - 2)) / (12.0 * h * h);
      worst = std::max(worst, std::abs(fd - snap.curvature_at(x)));
      scale = std::max(scale, std::abs(snap.curvature_at(x)));
    }
    add("strain vs finite differences", worst / scale, 1e-6);
    add("strain at supports", std::max(std::abs(snap.curvature_at(0.0)), std::abs(snap.curvature_at(L))) / scale, 1e-12);
  }

  {
    auto mo = metrics_options(cfg);
    mo.with_power = false;
    const auto pm = lambda_and_fom(model, mo);
    add("FoM^2 = lambda V_oc", std::abs(pm.fom * pm.fom / (pm.lambda * pm.open_circuit_voltage) - 1.0), 1e-12);
    const double v8 = impulse_peak_estimates(model.with_effective_resistance(1e8), 1.0, cfg.peak_options()).voltage;
    add("open circuit 1e8 vs 1e9", std::abs(v8 / pm.open_circuit_voltage - 1.0), 1e-3);
  }

  {
    const auto c = power_vs_load(model, cfg.solver.load_grid, cfg.peak_options());
    int changes = 0;
    for (std::size_t i = 2; i < c.points.size(); ++i) {
      const bool up0 = c.points[i - 1].power > c.points[i - 2].power;
      const bool up1 = c.points[i].power > c.points[i - 1].power;
      changes += up0 != up1;
    }
    add("power curve slope sign changes", changes, 1.0);
  }
  return out;
}

int cmd_verify(const RunOptions& opt, std::ostream& log) {
  const auto cfg = resolve_config(opt);
  const auto checks = verification_checks(cfg);
  Table t;
  t.columns = {"check", "value [-]", "limit [-]", "status"};
  bool ok = true;
  for (const auto& c : checks) {
    t.add({c.name, c.value, c.limit, std::string(c.pass ? "PASS" : "FAIL")});
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << format_double(c.value) << " <= " << format_double(c.limit)
        << ")\n";
    ok = ok && c.pass;
  }
  emit(opt, cfg, "verify", "verify", t, {{"passed", ok}});
  return ok ? kOk : kVerification;
}

}  // namespace fpbh::cli
