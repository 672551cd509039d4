#pragma once

// The assembled electromechanical model consumed by both solvers.

#include <variant>

#include "fpbh/laminate.hpp"
#include "fpbh/modal.hpp"

namespace fpbh {

/// Clamped-free beam loaded at a single point.
struct CantileverGeometry {
  double length = 0.0;         // m
  double load_position = 0.0;  // m from the clamp
  double piezo_start = 0.0;    // m
  double piezo_end = 0.0;      // m

  double span_ratio() const { return load_position / length; }
};

using Geometry = std::variant<FpbGeometry, CantileverGeometry>;

struct Circuit {
  double load_resistance = 0.0;  // R_L (Ohm)
  Wiring wiring = Wiring::single;
  CircuitConvention convention = CircuitConvention::as_printed;
};

/// Laminate + geometry + modal basis + circuit. Immutable; `with_load`
/// and friends return modified copies.
class HarvesterModel {
 public:
  HarvesterModel(Laminate lam, Geometry geom, ModalBasis basis, double load_resistance,
                 CircuitConvention conv = CircuitConvention::as_printed)
      : lam_(std::move(lam)), geom_(std::move(geom)), basis_(std::move(basis)) {
    circuit_ = {load_resistance, lam_.wiring(), conv};
    capacitance_ = lam_.capacitance(basis_.piezo_start(), basis_.piezo_end());
    effective_ = effective_circuit(lam_.wiring(), load_resistance, capacitance_, conv);
    check_consistent();
  }

  const Laminate& laminate() const { return lam_; }
  const Geometry& geometry() const { return geom_; }
  const ModalBasis& basis() const { return basis_; }
  const Circuit& circuit() const { return circuit_; }

  double mass_per_length() const { return lam_.mass_per_length(); }
  double length() const { return basis_.length(); }
  std::size_t mode_count() const { return basis_.size(); }

  /// Per-layer piezo capacitance C_p.
  double piezo_capacitance() const { return capacitance_; }
  double effective_capacitance() const { return effective_.capacitance; }
  double effective_resistance() const { return effective_.resistance; }

  bool is_fpb() const { return std::holds_alternative<FpbGeometry>(geom_); }

  HarvesterModel with_load(double load_resistance) const {
    return HarvesterModel(lam_, geom_, basis_, load_resistance, circuit_.convention);
  }

  /// Copy whose effective resistance equals `r_eff` (R_L adjusted for the wiring).
  HarvesterModel with_effective_resistance(double r_eff) const {
    const double scale = effective_.resistance / circuit_.load_resistance;
    return with_load(r_eff / scale);
  }

  HarvesterModel with_basis(ModalBasis basis) const {
    return HarvesterModel(lam_, geom_, std::move(basis), circuit_.load_resistance, circuit_.convention);
  }

 private:
  void check_consistent() const {
    if (const auto* g = std::get_if<FpbGeometry>(&geom_)) {
      const double tol = 1e-12 * g->total_length;
      if (basis_.kind() != BoundaryKind::pinned_pinned)
        throw ValidationError("basis", "four-point-bending geometry needs a pinned-pinned basis");
      if (std::abs(g->total_length - basis_.length()) > tol ||
          std::abs(g->piezo_start - basis_.piezo_start()) > tol || std::abs(g->piezo_end - basis_.piezo_end()) > tol)
        throw ValidationError("geometry", "basis and geometry disagree on length or piezo span");
    } else {
      const auto& c = std::get<CantileverGeometry>(geom_);
      const double tol = 1e-12 * c.length;
      if (basis_.kind() != BoundaryKind::clamped_free)
        throw ValidationError("basis", "cantilever geometry needs a clamped-free basis");
      if (std::abs(c.length - basis_.length()) > tol || std::abs(c.piezo_start - basis_.piezo_start()) > tol ||
          std::abs(c.piezo_end - basis_.piezo_end()) > tol)
        throw ValidationError("geometry", "basis and geometry disagree on length or piezo span");
    }
  }

  Laminate lam_;
  Geometry geom_;
  ModalBasis basis_;
  Circuit circuit_;
  double capacitance_ = 0.0;
  EffectiveCircuit effective_;
};

inline HarvesterModel make_fpb_model(const Laminate& lam, const FpbGeometry& geom, const Damping& damping,
                                     std::size_t modes, double load_resistance,
                                     CircuitConvention conv = CircuitConvention::as_printed) {
  return HarvesterModel(lam, geom, fpb_basis(geom, lam, damping, modes), load_resistance, conv);
}

inline HarvesterModel make_cantilever_model(const Laminate& lam, const CantileverGeometry& geom,
                                            const Damping& damping, std::size_t modes, double load_resistance,
                                            CircuitConvention conv = CircuitConvention::as_printed) {
  return HarvesterModel(lam, geom,
                        cantilever_basis(geom.length, lam, damping, modes, geom.load_position, geom.piezo_start,
                                         geom.piezo_end),
                        load_resistance, conv);
}

}  // namespace fpbh
