#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fpbh/analysis.hpp"

namespace fpbh::test {

// MFC-on-copper unimorph in the neighbourhood of the reference harvester.
inline Laminate unimorph(double hs = 0.2e-3, double hp = 0.25e-3, double width = 0.012) {
  return Laminate({MaterialLayer::elastic("shim", hs, 8960.0, 111.4e9), MaterialLayer::elastic("tape", 10e-6, 1200.0, 0.2e9),
                   MaterialLayer::piezo("mfc", hp, 5540.0, 24.8e9, -170e-12, 1800.0)},
                  width, Wiring::single);
}

inline Laminate bimorph(Wiring w, double hs = 0.2e-3, double hp = 0.25e-3, double width = 0.012) {
  const auto p = MaterialLayer::piezo("pzt", hp, 5540.0, 24.8e9, -170e-12, 1800.0);
  return Laminate({p, MaterialLayer::elastic("shim", hs, 8960.0, 111.4e9), p}, width, w);
}

inline constexpr double kLength = 0.09 / 0.88;

inline HarvesterModel fpb_model(double kappa = 0.88, double theta = 0.83, std::size_t modes = 4,
                                double load = 29e3, const Laminate& lam = unimorph()) {
  return make_fpb_model(lam, FpbGeometry::symmetric(kLength, kappa, theta), Damping::per_mode({0.03, 0.03, 0.05, 0.05, 0.07, 0.07, 0.09, 0.09}),
                        modes, load);
}

/// Composite Simpson rule with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels = 2000) {
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace fpbh::test
