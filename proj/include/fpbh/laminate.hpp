#pragma once

// Layered beam cross-section and its section-level constants.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fpbh/constants.hpp"
#include "fpbh/error.hpp"

namespace fpbh {

enum class LayerKind { elastic, piezo };

enum class Wiring { single, series, parallel };

inline const char* to_string(Wiring w) {
  switch (w) {
    case Wiring::single: return "single";
    case Wiring::series: return "series";
    case Wiring::parallel: return "parallel";
  }
  return "?";
}

inline Wiring wiring_from_string(const std::string& s) {
  if (s == "single" || s == "unimorph") return Wiring::single;
  if (s == "series") return Wiring::series;
  if (s == "parallel") return Wiring::parallel;
  throw ValidationError("wiring", "unknown wiring '" + s + "' (expected single|series|parallel)");
}

/// One lamina of the stack. For elastic layers `modulus` is Young's modulus;
/// for piezo layers it is the plane-stress short-circuit modulus c11E.
struct MaterialLayer {
  std::string name;
  LayerKind kind = LayerKind::elastic;
  double thickness = 0.0;  // m
  double density = 0.0;    // kg/m^3
  double modulus = 0.0;    // Pa
  double d31 = 0.0;        // C/N (piezo only, signed)
  double rel_permittivity = 0.0;  // eps33T / eps0 (piezo only)

  static MaterialLayer elastic(std::string name, double h, double rho, double Y) {
    return {std::move(name), LayerKind::elastic, h, rho, Y, 0.0, 0.0};
  }
  static MaterialLayer piezo(std::string name, double h, double rho, double c11E, double d31,
                             double rel_eps) {
    return {std::move(name), LayerKind::piezo, h, rho, c11E, d31, rel_eps};
  }

  bool is_piezo() const { return kind == LayerKind::piezo; }
  /// e31 = d31 * c11E (plane-stress stress constant).
  double e31() const { return d31 * modulus; }
  /// Clamped permittivity eps33S = eps33T - e31^2 / c11E.
  double eps33_strain() const {
    return rel_permittivity * kVacuumPermittivity - e31() * e31() / modulus;
  }

  bool operator==(const MaterialLayer&) const = default;
};

/// How the piezo mid-plane offset Z_p entering the electrical coupling is taken.
/// `neutral_axis` measures the piezo mid-plane from the computed neutral axis.
/// `layer_midplanes` uses (h_s + h_p)/2, the unimorph/bimorph shorthand.
enum class OffsetConvention { neutral_axis, layer_midplanes };

/// Equivalent circuit seen by the electrical equation.
struct EffectiveCircuit {
  double capacitance = 0.0;  // F
  double resistance = 0.0;   // Ohm
};

/// Equivalent-circuit override: `as_printed` keeps C_eff = C_p for every wiring and
/// R_eff = 2 R_L for parallel; `conventional` uses C_p/2 (series) and 2 C_p (parallel).
enum class CircuitConvention { as_printed, conventional };

inline EffectiveCircuit effective_circuit(Wiring wiring, double load_resistance, double capacitance,
                                          CircuitConvention conv = CircuitConvention::as_printed) {
  if (!(load_resistance > 0.0) || !std::isfinite(load_resistance))
    throw ValidationError("circuit.load_resistance", "load resistance must be positive");
  if (!(capacitance > 0.0)) throw ValidationError("circuit.capacitance", "capacitance must be positive");
  if (conv == CircuitConvention::conventional) {
    switch (wiring) {
      case Wiring::single: return {capacitance, load_resistance};
      case Wiring::series: return {capacitance / 2.0, load_resistance};
      case Wiring::parallel: return {2.0 * capacitance, load_resistance};
    }
  }
  switch (wiring) {
    case Wiring::single:
    case Wiring::series: return {capacitance, load_resistance};
    case Wiring::parallel: return {capacitance, 2.0 * load_resistance};
  }
  return {capacitance, load_resistance};
}

/// Immutable multi-layer section. Layers are ordered bottom to top; all
/// z-coordinates reported by accessors are relative to the neutral axis.
class Laminate {
 public:
  Laminate(std::vector<MaterialLayer> layers, double width, Wiring wiring,
           OffsetConvention offset = OffsetConvention::neutral_axis)
      : layers_(std::move(layers)), width_(width), wiring_(wiring), offset_conv_(offset) {
    validate();
    derive();
  }

  std::span<const MaterialLayer> layers() const { return layers_; }
  double width() const { return width_; }
  Wiring wiring() const { return wiring_; }
  OffsetConvention offset_convention() const { return offset_conv_; }

  /// Neutral axis measured from the bottom of the stack (m).
  double neutral_axis() const { return neutral_axis_; }
  /// Layer interface coordinates relative to the neutral axis, size layers()+1.
  std::span<const double> interfaces() const { return interfaces_; }
  double total_thickness() const { return interfaces_.back() - interfaces_.front(); }

  double bending_stiffness() const { return bending_stiffness_; }
  double mass_per_length() const { return mass_per_length_; }
  bool has_piezo() const { return !piezo_indices_.empty(); }
  double coupling_factor() const {
    require_piezo();
    return coupling_;
  }

  /// Z_p used by the electrical coupling term.
  double piezo_offset() const {
    require_piezo();
    return piezo_offset_;
  }
  /// Thickness of one piezo layer (h_p).
  double piezo_thickness() const { return piezo_layer().thickness; }
  const MaterialLayer& piezo_layer() const {
    require_piezo();
    return layers_[piezo_index_];
  }
  double e31() const { return piezo_layer().e31(); }
  double eps33_strain() const { return piezo_layer().eps33_strain(); }

  /// Indices of piezo layers, bottom to top.
  std::span<const std::size_t> piezo_indices() const { return piezo_indices_; }
  /// Lower/upper z (relative to the neutral axis) of layer i.
  std::pair<double, double> layer_bounds(std::size_t i) const { return {interfaces_[i], interfaces_[i + 1]}; }
  /// Piezo surface farthest from the neutral axis (signed z).
  double piezo_outer_surface() const {
    require_piezo();
    return piezo_outer_;
  }

  /// C_p = eps33S * b * (x_f - x_i) / h_p for one piezo layer.
  double capacitance(double x_i, double x_f) const {
    if (!(x_f > x_i)) throw ValidationError("geometry.piezo_span", "piezo span must satisfy x_f > x_i");
    return eps33_strain() * width_ * (x_f - x_i) / piezo_thickness();
  }

 private:
  void require_piezo() const {
    if (piezo_indices_.empty()) throw ValidationError("laminate.layers", "no piezo layer present");
  }

  void validate() const {
    if (layers_.empty()) throw ValidationError("laminate.layers", "layer stack is empty");
    if (!(width_ > 0.0) || !std::isfinite(width_))
      throw ValidationError("laminate.width", "width must be positive");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      const std::string path = "laminate.layers[" + std::to_string(i) + "]";
      if (!(l.thickness > 0.0)) throw ValidationError(path + ".thickness", "must be positive");
      if (!(l.density > 0.0)) throw ValidationError(path + ".density", "must be positive");
      if (!(l.modulus > 0.0)) throw ValidationError(path + ".modulus", "must be positive");
      if (l.is_piezo()) {
        if (!(l.rel_permittivity > 0.0))
          throw ValidationError(path + ".rel_permittivity", "must be positive");
        if (!(l.eps33_strain() > 0.0))
          throw ValidationError(path, "clamped permittivity eps33T - e31^2/c11E is not positive");
      }
    }
    std::size_t n_piezo = 0;
    for (const auto& l : layers_) n_piezo += l.is_piezo() ? 1 : 0;
    // A stack without piezo layers is a passive section: it has stiffness and
    // mass but asking for any electrical property throws.
    if (n_piezo == 0) return;
    if (wiring_ == Wiring::single && n_piezo != 1)
      throw ValidationError("laminate.wiring", "wiring 'single' needs exactly one piezo layer, got " +
                                                   std::to_string(n_piezo));
    if (wiring_ != Wiring::single && n_piezo != 2)
      throw ValidationError("laminate.wiring", std::string("wiring '") + to_string(wiring_) +
                                                   "' needs exactly two piezo layers, got " +
                                                   std::to_string(n_piezo));
  }

  void derive() {
    // Modulus-weighted first moment about the stack bottom.
    double ea = 0.0, first = 0.0, z = 0.0;
    for (const auto& l : layers_) {
      ea += l.modulus * l.thickness;
      first += l.modulus * l.thickness * (z + 0.5 * l.thickness);
      z += l.thickness;
    }
    neutral_axis_ = first / ea;

    interfaces_.resize(layers_.size() + 1);
    z = 0.0;
    interfaces_[0] = -neutral_axis_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      z += layers_[i].thickness;
      interfaces_[i + 1] = z - neutral_axis_;
    }

    bending_stiffness_ = 0.0;
    mass_per_length_ = 0.0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const double lo = interfaces_[i], hi = interfaces_[i + 1];
      bending_stiffness_ += layers_[i].modulus * (hi * hi * hi - lo * lo * lo);
      mass_per_length_ += width_ * layers_[i].thickness * layers_[i].density;
      if (layers_[i].is_piezo()) piezo_indices_.push_back(i);
    }
    bending_stiffness_ *= width_ / 3.0;

    if (piezo_indices_.empty()) return;
    if (wiring_ != Wiring::single) check_symmetric_pair();

    // The coupling and offset are taken from the upper piezo layer; for a
    // symmetric pair the lower layer mirrors it with reversed field.
    piezo_index_ = piezo_indices_.back();
    const auto [zb, zc] = layer_bounds(piezo_index_);
    const auto& p = layers_[piezo_index_];
    const double bracket = -p.e31() * width_ / (2.0 * p.thickness) * (zc * zc - zb * zb);
    coupling_ = wiring_ == Wiring::parallel ? 2.0 * bracket : bracket;

    piezo_outer_ = std::abs(zc) >= std::abs(zb) ? zc : zb;

    if (offset_conv_ == OffsetConvention::layer_midplanes) {
      piezo_offset_ = 0.5 * (substrate_thickness() + p.thickness);
    } else {
      piezo_offset_ = 0.5 * (zb + zc);
    }
  }

  // Sum of elastic-layer thickness, used as h_s by the layer_midplanes convention.
  double substrate_thickness() const {
    double hs = 0.0;
    for (const auto& l : layers_)
      if (!l.is_piezo()) hs += l.thickness;
    return hs;
  }

  void check_symmetric_pair() const {
    const auto& a = layers_[piezo_indices_[0]];
    const auto& b = layers_[piezo_indices_[1]];
    const auto [a0, a1] = layer_bounds(piezo_indices_[0]);
    const auto [b0, b1] = layer_bounds(piezo_indices_[1]);
    const double tol = 1e-9 * total_thickness();
    if (a.thickness != b.thickness || a.modulus != b.modulus || a.d31 != b.d31 ||
        a.rel_permittivity != b.rel_permittivity || a.density != b.density)
      throw ValidationError("laminate.layers", "bimorph piezo layers must be identical");
    if (std::abs(a0 + b1) > tol || std::abs(a1 + b0) > tol)
      throw ValidationError("laminate.layers", "bimorph piezo layers must sit symmetrically about the neutral axis");
  }

  std::vector<MaterialLayer> layers_;
  double width_;
  Wiring wiring_;
  OffsetConvention offset_conv_;

  double neutral_axis_ = 0.0;
  std::vector<double> interfaces_;
  double bending_stiffness_ = 0.0;
  double mass_per_length_ = 0.0;
  double coupling_ = 0.0;
  double piezo_offset_ = 0.0;
  double piezo_outer_ = 0.0;
  std::vector<std::size_t> piezo_indices_;
  std::size_t piezo_index_ = 0;
};

inline double bending_stiffness(const Laminate& lam) { return lam.bending_stiffness(); }
inline double coupling_factor(const Laminate& lam) { return lam.coupling_factor(); }
inline double capacitance(const Laminate& lam, double x_i, double x_f) { return lam.capacitance(x_i, x_f); }

}  // namespace fpbh
