#pragma once

#include <cmath>
#include <utility>

namespace fpbh {

/// Golden-section search for a maximum of a unimodal f on [a, b].
/// Returns (x, f(x)).
template <class F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, double tol = 1e-10, int max_iter = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol * (std::abs(a) + std::abs(b) + tol); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace fpbh
