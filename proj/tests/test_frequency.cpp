#include <catch_amalgamated.hpp>

#include "fpbh/time_domain.hpp"
#include "support.hpp"

using namespace fpbh;
using Catch::Approx;

namespace {

// Direct solve of the (N+1) x (N+1) complex harmonic system
//   (w_n^2 - w^2 + j 2 z_n w_n w) P_n + g_n V = s_n F / m
//   -j w sum L_n P_n + (1/R + j w C) V = 0
// by Gaussian elimination. Returns [P_1..P_N, V].
std::vector<Complex> direct_solve(const HarvesterModel& model, double w, Complex F) {
  const auto& b = model.basis();
  const std::size_t N = b.size(), D = N + 1;
  std::vector<std::vector<Complex>> A(D, std::vector<Complex>(D + 1, 0.0));
  for (std::size_t n = 0; n < N; ++n) {
    const auto& m = b.modes()[n];
    A[n][n] = Complex(m.omega * m.omega - w * w, 2 * m.zeta * m.omega * w);
    A[n][N] = m.gamma;
    A[n][D] = m.sigma * F / model.mass_per_length();
    A[N][n] = Complex(0.0, -w) * m.lambda;
  }
  A[N][N] = Complex(1.0 / model.effective_resistance(), w * model.effective_capacitance());
  for (std::size_t c = 0; c < D; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < D; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[p], A[c]);
    for (std::size_t r = 0; r < D; ++r) {
      if (r == c) continue;
      const Complex f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= D; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<Complex> x(D);
  for (std::size_t i = 0; i < D; ++i) x[i] = A[i][D] / A[i][i];
  return x;
}

}  // namespace

TEST_CASE("harmonic response satisfies the coupled equations") {
  const auto model = test::fpb_model(0.6, 0.83, 6, 12e3);
  for (double f : {0.3, 1.0, 2.7, 9.1, 25.0}) {
    const double w = f * model.basis().mode(1).omega;
    const Complex F(0.7, -0.2);
    const auto r = harmonic_response(model, w, F);
    const auto x = direct_solve(model, w, F);
    CHECK(std::abs(r.voltage - x.back()) <= 1e-10 * std::abs(x.back()));
    for (std::size_t n = 0; n < 6; ++n)
      CHECK(std::abs(r.modal[n] - x[n]) <= 1e-10 * std::max(std::abs(x[n]), std::abs(x[0])));
  }
}

TEST_CASE("psi at a short circuit decouples to the mechanical oscillator") {
  const auto model = test::fpb_model(0.88, 0.83, 4, 1e-6);
  const double w = 0.8 * model.basis().mode(1).omega;
  const auto r = harmonic_response(model, w, 1.0);
  CHECK(std::abs(r.voltage) < 1e-9);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto& m = model.basis().mode(n);
    const Complex free = m.sigma / model.mass_per_length() / Complex(m.omega * m.omega - w * w, 2 * m.zeta * m.omega * w);
    CHECK(std::abs(r.modal[n - 1] - free) <= 1e-8 * std::abs(r.modal[0]));
  }
}

TEST_CASE("single-mode resonant psi equals the full form at the natural frequency") {
  const auto model = test::fpb_model(0.88, 0.83, 1, 29e3);
  const double w1 = model.basis().mode(1).omega;
  CHECK(std::abs(psi(model, w1) - psi_resonant(model, w1)) < 1e-12 * std::abs(psi(model, w1)));
}

TEST_CASE("open-circuit voltage saturates with load") {
  const auto m = test::fpb_model();
  const double w = m.basis().mode(1).omega;
  const double v8 = std::abs(psi(m.with_effective_resistance(1e8), w));
  const double v9 = std::abs(psi(m.with_effective_resistance(1e9), w));
  CHECK(test::rel(v8, v9) < 1e-3);
  CHECK(std::abs(psi(m.with_effective_resistance(1e2), w)) < v9);
}

TEST_CASE("impulse peaks scale linearly and sum psi over all modes") {
  const auto m = test::fpb_model();
  const auto p1 = impulse_peak_estimates(m, 1.0);
  const auto p3 = impulse_peak_estimates(m, -3.0);
  CHECK(p3.voltage == Approx(3 * p1.voltage).epsilon(1e-14));
  CHECK(p3.deflection == Approx(3 * p1.deflection).epsilon(1e-14));
  CHECK(p3.strain == Approx(3 * p1.strain).epsilon(1e-14));
  Complex sum = 0.0;
  for (auto c : p1.psi) sum += c;
  CHECK(p1.voltage == Approx(std::abs(sum) / (2 * kPi)).epsilon(1e-14));
  CHECK(p1.strain_at >= m.basis().piezo_start());
  CHECK(p1.strain_at <= m.basis().piezo_end());
}

TEST_CASE("strain peak matches a fine finite-difference curvature") {
  const auto m = test::fpb_model(0.44);
  const auto p = impulse_peak_estimates(m, 1.0);
  const auto& b = m.basis();
  const double h = 1e-4 * b.length();
  const double x = p.strain_at;
  auto w = [&](double s) { return deflection(b, p.modal, s); };
  const Complex fd = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
  const double z = std::abs(m.laminate().piezo_outer_surface());
  CHECK(test::rel(z * std::abs(fd), p.strain) < 1e-6);
}

TEST_CASE("Fourier synthesis of a long sinusoid reaches the harmonic amplitude") {
  const auto m = test::fpb_model(0.88, 0.83, 4, 29e3);
  const double w = 0.9 * m.basis().mode(1).omega;
  SampledForce f;
  f.step = max_sample_step(m) / 2.0;
  const double t_end = 4.0;
  const auto n = static_cast<std::size_t>(t_end / f.step);
  f.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.values[i] = std::cos(w * f.step * static_cast<double>(i));
  const auto r = general_force_response(m, f);
  const double amp = harmonic_amplitude(r.time, r.voltage, w, 2.5);
  CHECK(test::rel(amp, std::abs(psi(m, w))) < 0.01);
}

TEST_CASE("narrow pulse through Fourier synthesis matches the time integrator") {
  const auto m = test::fpb_model(0.88, 0.83, 4, 29e3);
  const double dt = max_time_step(m) / 4.0;
  const auto pulse = half_sine_pulse(1e-3, 20 * dt, dt, 0.4);
  const auto fr = general_force_response(m, pulse);
  const auto tr = integrate(m, pulse, pulse.end(), dt);
  const std::size_t n = std::min(tr.size(), fr.voltage.size());
  REQUIRE(n + 1 >= fr.voltage.size());
  double peak_t = 0.0, peak_f = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(tr.time[i] == Approx(fr.time[i]).margin(1e-9 * dt));
    peak_t = std::max(peak_t, std::abs(tr.voltage[i]));
    peak_f = std::max(peak_f, std::abs(fr.voltage[i]));
    diff = std::max(diff, std::abs(tr.voltage[i] - fr.voltage[i]));
  }
  CHECK(test::rel(peak_f, peak_t) < 0.02);
  CHECK(diff < 0.02 * peak_t);
}

TEST_CASE("synthesis rejects an under-resolved force") {
  const auto m = test::fpb_model();
  SampledForce f;
  f.step = 2.0 * max_sample_step(m);
  f.values.assign(100, 0.0);
  CHECK_THROWS_AS(general_force_response(m, f), ValidationError);
}
