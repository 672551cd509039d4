#pragma once

namespace fpbh {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

/// Load resistance treated as an open circuit.
inline constexpr double kOpenCircuitResistance = 1e9;  // Ohm

}  // namespace fpbh
