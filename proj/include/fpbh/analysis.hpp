#pragma once

// Design-level outputs: strain fields, active volume, power versus load,
// lambda / FoM, parameter sweeps and the cantilever comparison.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "fpbh/frequency.hpp"
#include "fpbh/golden.hpp"

namespace fpbh {

// ---------------------------------------------------------------------------
// Strain field

enum class GridKind { nodes, cells };

struct StrainGrid {
  std::size_t xi_points = 401;
  std::size_t z_per_layer = 81;
  GridKind kind = GridKind::nodes;  // cells: midpoints of equal cells, used for volume fractions
};

/// eps_xx(xi, z) = -z w''(x). Rows of `values` follow `z`, columns follow `xi`.
struct StrainField {
  std::vector<double> xi;      // x / L_T
  std::vector<double> z;       // m from the neutral axis
  std::vector<std::size_t> layer;  // layer index of each z row
  std::vector<double> xi_weight;
  std::vector<double> z_weight;
  std::vector<double> values;
  double length = 0.0;
  double instant = 0.0;  // phase angle (rad) of the snapshot
  std::string model_id;

  double at(std::size_t iz, std::size_t ix) const { return values[iz * xi.size() + ix]; }
};

namespace detail {

inline std::vector<double> grid(double a, double b, std::size_t n, GridKind kind) {
  std::vector<double> g(n);
  if (kind == GridKind::cells) {
    for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      g[i] = n == 1 ? 0.5 * (a + b) : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

inline std::vector<double> weights(double a, double b, std::size_t n, GridKind kind) {
  std::vector<double> w(n, (b - a) / static_cast<double>(n));
  if (kind == GridKind::nodes && n > 1) {
    std::fill(w.begin(), w.end(), (b - a) / static_cast<double>(n - 1));
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

}  // namespace detail

/// Real curvature profile w''(x) from complex modal amplitudes, rotated so the
/// snapshot is taken at the instant the peak |w''| over the piezo span is reached.
class CurvatureSnapshot {
 public:
  CurvatureSnapshot(const ModalBasis& basis, std::vector<Complex> modal, std::size_t search_points = 401)
      : basis_(&basis), modal_(std::move(modal)) {
    double best = -1.0;
    Complex at_best = 1.0;
    const double a = basis.piezo_start(), b = basis.piezo_end();
    for (std::size_t i = 0; i < search_points; ++i) {
      const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(search_points, 2) - 1);
      const Complex k = curvature(basis, modal_, x);
      if (std::abs(k) > best) {
        best = std::abs(k);
        at_best = k;
      }
    }
    phase_ = std::arg(at_best);
  }

  /// Real amplitudes: no phase rotation.
  CurvatureSnapshot(const ModalBasis& basis, const std::vector<double>& modal)
      : basis_(&basis), modal_(modal.begin(), modal.end()), phase_(0.0) {}

  double phase() const { return phase_; }
  double curvature_at(double x) const {
    return (std::exp(Complex(0.0, -phase_)) * curvature(*basis_, modal_, x)).real();
  }
  double deflection_at(double x) const {
    return (std::exp(Complex(0.0, -phase_)) * deflection(*basis_, modal_, x)).real();
  }

 private:
  const ModalBasis* basis_;
  std::vector<Complex> modal_;
  double phase_ = 0.0;
};

inline StrainField strain_field(const HarvesterModel& model, const CurvatureSnapshot& snap, const StrainGrid& g = {}) {
  if (g.xi_points < 1 || g.z_per_layer < 1) throw ValidationError("grid", "grid sizes must be positive");
  const auto& lam = model.laminate();
  StrainField f;
  f.length = model.length();
  f.instant = snap.phase();
  f.model_id = model.is_fpb() ? "fpb" : "cantilever";
  f.xi = detail::grid(0.0, 1.0, g.xi_points, g.kind);
  f.xi_weight = detail::weights(0.0, 1.0, g.xi_points, g.kind);
  for (std::size_t i = 0; i < lam.layers().size(); ++i) {
    const auto [lo, hi] = lam.layer_bounds(i);
    const auto zs = detail::grid(lo, hi, g.z_per_layer, g.kind);
    const auto ws = detail::weights(lo, hi, g.z_per_layer, g.kind);
    f.z.insert(f.z.end(), zs.begin(), zs.end());
    f.z_weight.insert(f.z_weight.end(), ws.begin(), ws.end());
    f.layer.insert(f.layer.end(), zs.size(), i);
  }
  std::vector<double> curv(f.xi.size());
  for (std::size_t j = 0; j < f.xi.size(); ++j) curv[j] = snap.curvature_at(std::clamp(f.xi[j], 0.0, 1.0) * f.length);
  f.values.resize(f.z.size() * f.xi.size());
  for (std::size_t i = 0; i < f.z.size(); ++i)
    for (std::size_t j = 0; j < f.xi.size(); ++j) f.values[i * f.xi.size() + j] = -f.z[i] * curv[j];
  return f;
}

/// Grid checks for user-supplied points.
inline double strain_at(const HarvesterModel& model, const CurvatureSnapshot& snap, double xi, double z) {
  if (xi < 0.0 || xi > 1.0) throw ValidationError("grid.xi", "xi outside [0, 1]");
  const auto ifs = model.laminate().interfaces();
  if (z < ifs.front() || z > ifs.back()) throw ValidationError("grid.z", "z outside the section");
  return -z * snap.curvature_at(xi * model.length());
}

/// Volume-weighted share of the piezo region with |eps| >= threshold * max|eps|.
inline double active_volume_fraction(const StrainField& f, const Laminate& lam, double x_start, double x_end,
                                     double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("threshold", "must lie in (0, 1]");
  const auto piezo = lam.piezo_indices();
  auto in_piezo_layer = [&](std::size_t l) { return std::find(piezo.begin(), piezo.end(), l) != piezo.end(); };
  const double a = x_start / f.length, b = x_end / f.length;
  double peak = 0.0;
  for (std::size_t i = 0; i < f.z.size(); ++i) {
    if (!in_piezo_layer(f.layer[i])) continue;
    for (std::size_t j = 0; j < f.xi.size(); ++j)
      if (f.xi[j] >= a && f.xi[j] <= b) peak = std::max(peak, std::abs(f.at(i, j)));
  }
  double total = 0.0, active = 0.0;
  for (std::size_t i = 0; i < f.z.size(); ++i) {
    if (!in_piezo_layer(f.layer[i])) continue;
    for (std::size_t j = 0; j < f.xi.size(); ++j) {
      if (f.xi[j] < a || f.xi[j] > b) continue;
      const double w = f.z_weight[i] * f.xi_weight[j];
      total += w;
      if (std::abs(f.at(i, j)) >= threshold * peak) active += w;
    }
  }
  if (total <= 0.0) throw ValidationError("piezo_region", "no grid cells inside the piezo region");
  return active / total;
}

/// Fraction for a model's impulse peak snapshot on a cell-centred grid.
inline double active_volume_fraction(const HarvesterModel& model, double threshold, const PeakOptions& po = {},
                                     StrainGrid g = {}) {
  g.kind = GridKind::cells;
  const auto peaks = impulse_peak_estimates(model.with_effective_resistance(kOpenCircuitResistance), 1.0, po);
  const CurvatureSnapshot snap(model.basis(), peaks.modal, po.grid_points);
  const auto f = strain_field(model, snap, g);
  return active_volume_fraction(f, model.laminate(), model.basis().piezo_start(), model.basis().piezo_end(),
                                threshold);
}

// ---------------------------------------------------------------------------
// Power versus load

struct LoadGrid {
  double min = 1e2;  // Ohm
  double max = 1e8;  // Ohm
  std::size_t points = 61;

  void validate() const {
    if (!(min > 0.0 && max > min)) throw ValidationError("solver.load_grid", "need 0 < min < max");
    if (points < 3) throw ValidationError("solver.load_grid.points", "need at least 3 points");
    if (max / min < 1e4 * (1.0 - 1e-12)) throw ValidationError("solver.load_grid", "grid must span at least 4 decades");
  }
  std::vector<double> values() const {
    std::vector<double> r(points);
    const double la = std::log10(min), lb = std::log10(max);
    for (std::size_t i = 0; i < points; ++i)
      r[i] = std::pow(10.0, la + (lb - la) * static_cast<double>(i) / static_cast<double>(points - 1));
    return r;
  }
};

struct LoadPoint {
  double load = 0.0;     // R_L (Ohm)
  double voltage = 0.0;  // V/N
  double current = 0.0;  // A/N
  double power = 0.0;    // W/N^2
};

struct LoadCurve {
  std::vector<LoadPoint> points;
  double optimal_load = 0.0;  // R_L at maximum power (Ohm)
  double peak_power = 0.0;    // W/N^2
};

inline LoadPoint load_point(const HarvesterModel& model, double load, const PeakOptions& po) {
  const auto m = model.with_load(load);
  const double v = impulse_peak_estimates(m, 1.0, po).voltage;
  const double r = m.effective_resistance();
  return {load, v, v / r, v * v / r};
}

/// Peak power P = V^2 / R_eff over a log-spaced R_L grid, refined by
/// golden-section search in log R around the best grid point.
inline LoadCurve power_vs_load(const HarvesterModel& model, const LoadGrid& grid = {}, const PeakOptions& po = {}) {
  grid.validate();
  LoadCurve c;
  for (double r : grid.values()) c.points.push_back(load_point(model, r, po));
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    if (c.points[i].power > c.points[best].power) best = i;
  const double lo = std::log10(c.points[best == 0 ? 0 : best - 1].load);
  const double hi = std::log10(c.points[std::min(best + 1, c.points.size() - 1)].load);
  const auto [x, p] = golden_section_max([&](double lr) { return load_point(model, std::pow(10.0, lr), po).power; },
                                         lo, hi, 1e-12);
  c.optimal_load = std::pow(10.0, x);
  c.peak_power = p;
  return c;
}

// ---------------------------------------------------------------------------
// Performance metrics

struct PerformanceMetrics {
  double open_circuit_voltage = 0.0;  // V/N
  double max_strain = 0.0;            // 1/N
  double lambda = 0.0;                // V
  double fom = 0.0;                   // V
  double optimal_load = 0.0;          // Ohm
  double peak_power = 0.0;            // W/N^2
  double max_deflection = 0.0;        // m/N
  double max_stress = 0.0;            // Pa/N
};

struct MetricsOptions {
  PeakOptions peak;
  bool with_power = true;
  LoadGrid loads;
};

/// V_oc and strain at R_eff = 1e9 Ohm; lambda = V_oc / eps_max; FoM = sqrt(lambda V_oc).
inline PerformanceMetrics lambda_and_fom(const HarvesterModel& model, const MetricsOptions& opt = {}) {
  PerformanceMetrics pm;
  const auto oc = model.with_effective_resistance(kOpenCircuitResistance);
  const auto p = impulse_peak_estimates(oc, 1.0, opt.peak);
  pm.open_circuit_voltage = p.voltage;
  pm.max_strain = p.strain;
  pm.max_deflection = p.deflection;
  pm.lambda = p.strain > 0.0 ? p.voltage / p.strain : 0.0;
  pm.fom = std::sqrt(pm.lambda * pm.open_circuit_voltage);
  pm.max_stress = model.laminate().piezo_layer().modulus * p.strain;
  if (opt.with_power) {
    const auto c = power_vs_load(model, opt.loads, opt.peak);
    pm.optimal_load = c.optimal_load;
    pm.peak_power = c.peak_power;
  }
  return pm;
}

// ---------------------------------------------------------------------------
// Sweeps

/// Same beam and piezo span, symmetric load lines at kappa.
inline HarvesterModel with_kappa(const HarvesterModel& model, double kappa) {
  const auto* g = std::get_if<FpbGeometry>(&model.geometry());
  if (!g) throw ValidationError("geometry", "kappa sweep needs a four-point-bending model");
  if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("kappa", "kappa must lie in (0, 1)");
  FpbGeometry ng = *g;
  ng.overhang_left = ng.overhang_right = 0.5 * (1.0 - kappa) * ng.total_length;
  ng.load_split = 0.5 * kappa * ng.total_length;
  ng.validate();
  const auto sigma = force_coefficients(model.basis(), ng);
  return HarvesterModel(model.laminate(), ng, model.basis().with_force_coefficients(sigma),
                        model.circuit().load_resistance, model.circuit().convention);
}

/// Same load layout, centered piezo of length theta * L_T.
inline HarvesterModel with_theta(const HarvesterModel& model, double theta, const Damping& damping) {
  const auto* g = std::get_if<FpbGeometry>(&model.geometry());
  if (!g) throw ValidationError("geometry", "theta sweep needs a four-point-bending model");
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta", "theta must lie in (0, 1]");
  FpbGeometry ng = *g;
  ng.piezo_start = 0.5 * (1.0 - theta) * ng.total_length;
  ng.piezo_end = ng.total_length - ng.piezo_start;
  ng.validate();
  return make_fpb_model(model.laminate(), ng, damping, model.mode_count(), model.circuit().load_resistance,
                        model.circuit().convention);
}

struct KappaPoint {
  double kappa = 0.0;
  PerformanceMetrics metrics;
};

inline std::vector<KappaPoint> sweep_kappa(const HarvesterModel& model, const std::vector<double>& kappas,
                                           const MetricsOptions& opt = {}) {
  std::vector<KappaPoint> out;
  out.reserve(kappas.size());
  for (double k : kappas) {
    if (!(k > 0.0 && k < 1.0)) throw ValidationError("kappa_grid", "kappa " + std::to_string(k) + " outside (0, 1)");
    out.push_back({k, lambda_and_fom(with_kappa(model, k), opt)});
  }
  return out;
}

/// Index of the largest FoM in a sweep.
inline std::size_t best_fom(const std::vector<KappaPoint>& s) {
  std::size_t b = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].metrics.fom > s[b].metrics.fom) b = i;
  return b;
}

inline double piezo_volume(const HarvesterModel& model) {
  const auto& lam = model.laminate();
  return static_cast<double>(lam.piezo_indices().size()) * lam.width() * lam.piezo_thickness() *
         (model.basis().piezo_end() - model.basis().piezo_start());
}

struct ThetaPoint {
  double theta = 0.0;
  double optimal_load = 0.0;   // Ohm
  double peak_power = 0.0;     // W/N^2
  double power_density = 0.0;  // W/(N^2 m^3), per piezo volume
};

inline std::vector<ThetaPoint> sweep_theta(const HarvesterModel& model, const Damping& damping,
                                           const std::vector<double>& thetas, const LoadGrid& loads = {},
                                           const PeakOptions& po = {}) {
  std::vector<ThetaPoint> out;
  for (double t : thetas) {
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("theta_grid", "theta " + std::to_string(t) + " outside (0, 1]");
    const auto m = with_theta(model, t, damping);
    const auto c = power_vs_load(m, loads, po);
    out.push_back({t, c.optimal_load, c.peak_power, c.peak_power / piezo_volume(m)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cantilever comparison

struct DevicePoint {
  double voltage = 0.0;  // V_oc (V/N)
  double strain = 0.0;   // 1/N
  double stress = 0.0;   // Pa/N
  double lambda = 0.0;   // V
};

struct ComparisonRow {
  double span = 0.0;  // kappa for the FPB, load position / length for the cantilever
  DevicePoint fpb;
  DevicePoint cantilever;
};

struct ComparisonSummary {
  std::vector<ComparisonRow> rows;
  std::size_t fpb_best_lambda = 0;
  std::size_t fpb_best_voltage = 0;
  std::size_t cantilever_best_lambda = 0;
  std::size_t cantilever_best_voltage = 0;
};

inline HarvesterModel with_load_position(const HarvesterModel& model, double position) {
  const auto* g = std::get_if<CantileverGeometry>(&model.geometry());
  if (!g) throw ValidationError("geometry", "load position applies to cantilever models");
  if (!(position > 0.0 && position <= g->length * (1.0 + 1e-12)))
    throw ValidationError("cantilever.load_position", "load must act on the beam (0, length]");
  CantileverGeometry ng = *g;
  ng.load_position = std::min(position, g->length);
  std::vector<double> sigma(model.mode_count());
  for (std::size_t n = 1; n <= sigma.size(); ++n) sigma[n - 1] = -model.basis().shape(n, ng.load_position);
  return HarvesterModel(model.laminate(), ng, model.basis().with_force_coefficients(sigma),
                        model.circuit().load_resistance, model.circuit().convention);
}

inline DevicePoint device_point(const HarvesterModel& model, const PeakOptions& po) {
  MetricsOptions mo;
  mo.peak = po;
  mo.with_power = false;
  const auto pm = lambda_and_fom(model, mo);
  return {pm.open_circuit_voltage, pm.max_strain, pm.max_stress, pm.lambda};
}

inline ComparisonSummary compare_cantilever(const HarvesterModel& fpb, const HarvesterModel& cant,
                                            const std::vector<double>& spans, const PeakOptions& po = {}) {
  if (!fpb.is_fpb() || cant.is_fpb()) throw ValidationError("compare", "need one FPB and one cantilever model");
  if (!(fpb.laminate().layers().size() == cant.laminate().layers().size() &&
        std::equal(fpb.laminate().layers().begin(), fpb.laminate().layers().end(), cant.laminate().layers().begin()) &&
        fpb.laminate().width() == cant.laminate().width() && fpb.laminate().wiring() == cant.laminate().wiring()))
    throw ValidationError("compare", "FPB and cantilever models must share the laminate");
  ComparisonSummary s;
  const double Lc = std::get<CantileverGeometry>(cant.geometry()).length;
  for (double sp : spans) {
    if (!(sp > 0.0 && sp < 1.0 + 1e-12)) throw ValidationError("span_grid", "span outside (0, 1]");
    ComparisonRow r;
    r.span = sp;
    // kappa = 1 puts the load lines on the supports; the FPB row is undefined there.
    if (sp < 1.0 - 1e-12) {
      r.fpb = device_point(with_kappa(fpb, sp), po);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.fpb = {nan, nan, nan, nan};
    }
    r.cantilever = device_point(with_load_position(cant, sp * Lc), po);
    s.rows.push_back(r);
  }
  auto argmax = [&](auto get) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < s.rows.size(); ++i)
      if (get(s.rows[i]) > get(s.rows[b])) b = i;
    return b;
  };
  s.fpb_best_lambda = argmax([](const ComparisonRow& r) { return r.fpb.lambda; });
  s.fpb_best_voltage = argmax([](const ComparisonRow& r) { return r.fpb.voltage; });
  s.cantilever_best_lambda = argmax([](const ComparisonRow& r) { return r.cantilever.lambda; });
  s.cantilever_best_voltage = argmax([](const ComparisonRow& r) { return r.cantilever.voltage; });
  return s;
}

// ---------------------------------------------------------------------------

/// |P V / YI| over the peak curvature of mode 1 at unit modal amplitude.
inline double bc_simplification_ratio(const HarvesterModel& model, double voltage) {
  if (voltage < 0.0) throw ValidationError("voltage", "must be non-negative");
  const auto& lam = model.laminate();
  const auto& basis = model.basis();
  double peak = 0.0;
  const std::size_t G = 401;
  for (std::size_t i = 0; i < G; ++i) {
    const double x = basis.length() * static_cast<double>(i) / static_cast<double>(G - 1);
    peak = std::max(peak, std::abs(basis.curvature(1, x)));
  }
  return std::abs(lam.coupling_factor() * voltage / lam.bending_stiffness()) / peak;
}

}  // namespace fpbh
