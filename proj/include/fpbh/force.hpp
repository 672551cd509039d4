#pragma once

// Force signals shared by the frequency- and time-domain solvers.

#include <cmath>
#include <variant>
#include <vector>

#include "fpbh/error.hpp"

namespace fpbh {

/// Dirac impulse F(t) = magnitude * delta(t - time). `magnitude` carries N s.
struct Impulse {
  double magnitude = 1.0;
  double time = 0.0;
};

/// Uniformly sampled force, linearly interpolated between samples and zero outside.
struct SampledForce {
  double start = 0.0;  // time of values[0] (s)
  double step = 0.0;   // dt (s)
  std::vector<double> values;  // N

  double end() const { return start + step * static_cast<double>(values.empty() ? 0 : values.size() - 1); }

  double at(double t) const {
    if (values.empty() || t < start || t > end()) return 0.0;
    const double u = (t - start) / step;
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= values.size()) return values.back();
    const double frac = u - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
  }

  void validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("force.step", "sample step must be positive");
    if (values.empty()) throw ValidationError("force.values", "no samples");
    for (double v : values)
      if (!std::isfinite(v)) throw ValidationError("force.values", "non-finite sample");
  }
};

/// F(t) = amplitude * cos(omega t + phase), switched on at t = 0.
struct HarmonicForce {
  double amplitude = 1.0;  // N
  double omega = 0.0;      // rad/s
  double phase = 0.0;      // rad

  double at(double t) const { return t < 0.0 ? 0.0 : amplitude * std::cos(omega * t + phase); }
};

using ForceSignal = std::variant<Impulse, SampledForce, HarmonicForce>;

/// Narrow half-sine pulse with the given impulse (integral) and duration.
inline SampledForce half_sine_pulse(double impulse, double duration, double step, double total_time) {
  SampledForce f;
  f.step = step;
  const auto n = static_cast<std::size_t>(std::llround(total_time / step)) + 1;
  f.values.assign(n, 0.0);
  const double peak = impulse * 3.14159265358979323846 / (2.0 * duration);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step;
    if (t <= duration) f.values[i] = peak * std::sin(3.14159265358979323846 * t / duration);
  }
  return f;
}

}  // namespace fpbh
