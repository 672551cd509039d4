#pragma once

// Design configuration: parsing (YAML or JSON), unit normalization,
// validation with field paths, serialization and hashing.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpbh/analysis.hpp"

namespace fpbh::cli {

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::elastic;
  double thickness = 0.0;  // m
  double density = 0.0;    // kg/m^3
  double modulus = 0.0;    // Pa
  double d31 = 0.0;        // C/N
  double rel_permittivity = 0.0;

  bool operator==(const LayerSpec&) const = default;
};

struct LaminateSpec {
  std::vector<LayerSpec> layers;
  double width = 0.0;  // m
  Wiring wiring = Wiring::single;
  OffsetConvention offset = OffsetConvention::neutral_axis;

  bool operator==(const LaminateSpec&) const = default;
};

/// Either kappa or (a1, a2, u1); either theta or (x_i, x_f).
struct GeometrySpec {
  double total_length = 0.0;  // m
  std::optional<double> kappa;
  std::optional<double> a1, a2, u1;  // m
  std::optional<double> theta;
  std::optional<double> piezo_start, piezo_end;  // m

  bool operator==(const GeometrySpec&) const = default;
};

struct DampingSpec {
  std::vector<double> ratios;
  std::optional<double> viscous;  // c_a (N s/m^2)

  bool operator==(const DampingSpec&) const = default;
};

struct CircuitSpec {
  double load_resistance = 0.0;  // R_L (Ohm)
  CircuitConvention convention = CircuitConvention::as_printed;

  bool operator==(const CircuitSpec&) const = default;
};

struct RangeSpec {
  double min = 0.0, max = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i)
      v[i] = points == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
    if (points > 1) v.back() = max;
    return v;
  }
  bool operator==(const RangeSpec&) const = default;
};

struct SolverSpec {
  std::size_t modes = 4;
  PsiForm psi_form = PsiForm::resonant;
  std::size_t space_points = 401;
  std::size_t z_points = 81;
  double impulse = 1.0;  // N s
  LoadGrid load_grid;
  RangeSpec kappa_grid{0.10, 0.95, 18};
  std::vector<double> theta_grid{0.75, 0.79, 0.83, 0.86, 0.90};
  RangeSpec span_grid{0.10, 1.00, 19};
  double threshold = 0.40;
  double t_end = 0.5;  // s, time-domain runs
  std::optional<double> time_step;  // s

  bool operator==(const SolverSpec& o) const {
    return modes == o.modes && psi_form == o.psi_form && space_points == o.space_points && z_points == o.z_points &&
           impulse == o.impulse && load_grid.min == o.load_grid.min && load_grid.max == o.load_grid.max &&
           load_grid.points == o.load_grid.points && kappa_grid == o.kappa_grid && theta_grid == o.theta_grid &&
           span_grid == o.span_grid && threshold == o.threshold && t_end == o.t_end && time_step == o.time_step;
  }
};

struct CantileverSpec {
  double length = 0.0;  // m
  double load_position = 0.0;  // m
  double piezo_start = 0.0;    // m
  double piezo_end = 0.0;      // m

  bool operator==(const CantileverSpec&) const = default;
};

struct DesignConfig {
  std::string name;
  std::string notes;
  LaminateSpec laminate;
  GeometrySpec geometry;
  DampingSpec damping;
  CircuitSpec circuit;
  SolverSpec solver;
  std::optional<CantileverSpec> cantilever;

  bool operator==(const DesignConfig&) const = default;

  Laminate build_laminate() const;
  FpbGeometry build_geometry() const;
  Damping build_damping() const;
  HarvesterModel build_model() const;
  HarvesterModel build_cantilever() const;
  PeakOptions peak_options() const { return {solver.psi_form, solver.space_points}; }
  void validate() const;
};

/// Parse a quantity: a number (SI) or "<number> <unit>" with a unit accepted
/// for `dimension`. Throws ValidationError naming `path`.
double parse_quantity(const nlohmann::json& v, const std::string& dimension, const std::string& path);

DesignConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const DesignConfig& c);

/// YAML (or JSON, which is accepted by the same reader) text to config.
DesignConfig parse_config(const std::string& text, const std::string& source = "config");
DesignConfig load_config(const std::filesystem::path& path);

std::string to_yaml(const DesignConfig& c);
std::string to_json_text(const DesignConfig& c);

/// FNV-1a 64 over the canonical JSON form.
std::uint64_t config_hash(const DesignConfig& c);
std::string hex(std::uint64_t v);

}  // namespace fpbh::cli
