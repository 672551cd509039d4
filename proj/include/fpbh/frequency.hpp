#pragma once

// Frequency-domain solution of the coupled modal/circuit equations:
// per-mode FRFs, the energy conversion term, harmonic and general-force
// responses, and the resonance-based impulse peak estimates.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fpbh/constants.hpp"
#include "fpbh/force.hpp"
#include "fpbh/harvester.hpp"

namespace fpbh {

using Complex = std::complex<double>;

/// alpha_n(omega) = 1 / (omega_n^2 - omega^2 + j 2 zeta_n omega_n omega)
inline Complex frf_alpha(const ModalBasis& basis, std::size_t n, double omega) {
  const auto& m = basis.mode(n);
  return 1.0 / Complex(m.omega * m.omega - omega * omega, 2.0 * m.zeta * m.omega * omega);
}

/// Energy conversion term Psi(omega, R_eff): voltage per unit force phasor.
inline Complex psi(const HarvesterModel& model, double omega) {
  const auto& basis = model.basis();
  Complex drive = 0.0, load = 0.0;
  for (std::size_t n = 1; n <= basis.size(); ++n) {
    const auto& m = basis.mode(n);
    const Complex a = frf_alpha(basis, n, omega);
    drive += m.lambda * m.sigma * a;
    load += m.lambda * m.gamma * a;
  }
  const Complex jw(0.0, omega);
  return (jw * drive / model.mass_per_length()) /
         (1.0 / model.effective_resistance() + jw * model.effective_capacitance() + jw * load);
}

/// Psi under the modal assumption: every alpha_k replaced by its resonant value
/// alpha_k(omega_k) = 1/(j 2 zeta_k omega_k^2), so the mode sums become
/// sum Lambda_k sigma_k / (2 zeta_k omega_k) and sum Lambda_k gamma_k / (2 zeta_k omega_k).
inline Complex psi_resonant(const HarvesterModel& model, double omega) {
  double drive = 0.0, load = 0.0;
  for (const auto& m : model.basis().modes()) {
    drive += m.lambda * m.sigma / (2.0 * m.zeta * m.omega);
    load += m.lambda * m.gamma / (2.0 * m.zeta * m.omega);
  }
  return (drive / model.mass_per_length()) /
         Complex(1.0 / model.effective_resistance() + load, model.effective_capacitance() * omega);
}

struct HarmonicResponse {
  double omega = 0.0;
  Complex voltage;             // V
  std::vector<Complex> modal;  // Pi_n
  Complex psi;
};

/// Steady state under F(t) = Re(force e^{j omega t}). `force` is the phasor
/// amplitude, i.e. F_hat(omega) / (2 pi) in the Fourier-synthesis convention.
inline HarmonicResponse harmonic_response(const HarvesterModel& model, double omega, Complex force) {
  HarmonicResponse r;
  r.omega = omega;
  r.psi = psi(model, omega);
  r.voltage = force * r.psi;
  const auto& basis = model.basis();
  r.modal.resize(basis.size());
  for (std::size_t n = 1; n <= basis.size(); ++n) {
    const auto& m = basis.mode(n);
    r.modal[n - 1] = force * frf_alpha(basis, n, omega) * (m.sigma / model.mass_per_length() - m.gamma * r.psi);
  }
  return r;
}

/// Deflection phasor sum_n Pi_n phi_n(x).
inline Complex deflection(const ModalBasis& basis, std::span<const Complex> modal, double x) {
  Complex w = 0.0;
  for (std::size_t n = 1; n <= basis.size(); ++n) w += modal[n - 1] * basis.shape(n, x);
  return w;
}

/// Curvature phasor sum_n Pi_n phi_n''(x).
inline Complex curvature(const ModalBasis& basis, std::span<const Complex> modal, double x) {
  Complex k = 0.0;
  for (std::size_t n = 1; n <= basis.size(); ++n) k += modal[n - 1] * basis.curvature(n, x);
  return k;
}

// ---------------------------------------------------------------------------
// General force by Fourier synthesis

struct SynthesisOptions {
  std::size_t pad_factor = 4;  // FFT length >= pad_factor * signal length, rounded up to a power of two
  double observe_at = -1.0;    // x* for the deflection output; < 0 means mid-length
  std::size_t min_samples_per_period = 10;
};

struct TimeResponse {
  std::vector<double> time;
  std::vector<double> voltage;     // V_R(t)
  std::vector<double> deflection;  // w(x*, t)
  double observe_at = 0.0;
};

namespace detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

/// Largest admissible sample step for a model: the highest modal period
/// divided by `samples_per_period`.
inline double max_sample_step(const HarvesterModel& model, std::size_t samples_per_period = 10) {
  double wmax = 0.0;
  for (const auto& m : model.basis().modes()) wmax = std::max(wmax, m.omega);
  return 2.0 * kPi / wmax / static_cast<double>(samples_per_period);
}

/// Voltage and deflection histories for a sampled force: forward transform,
/// per-bin harmonic solution, inverse synthesis. The signal is zero-padded to
/// suppress circular wrap-around; outputs cover the original sample window.
inline TimeResponse general_force_response(const HarvesterModel& model, const SampledForce& force,
                                           const SynthesisOptions& opt = {}) {
  force.validate();
  const double dt = force.step;
  const double dt_max = max_sample_step(model, opt.min_samples_per_period);
  if (dt > dt_max)
    throw ValidationError("force.step", "sample step " + std::to_string(dt) + " s under-resolves mode " +
                                            std::to_string(model.mode_count()) + "; need dt <= " +
                                            std::to_string(dt_max) + " s");
  const std::size_t ns = force.values.size();
  const std::size_t nfft = detail::next_pow2(std::max<std::size_t>(opt.pad_factor, 1) * ns);
  const std::size_t nbins = nfft / 2 + 1;
  const double x_obs = opt.observe_at < 0.0 ? 0.5 * model.length() : opt.observe_at;

  std::unique_ptr<double, detail::FftwFree> buf(static_cast<double*>(fftw_malloc(sizeof(double) * nfft)));
  std::unique_ptr<fftw_complex, detail::FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));
  std::unique_ptr<fftw_complex, detail::FftwFree> vspec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));
  std::unique_ptr<fftw_complex, detail::FftwFree> wspec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));

  // Planning mutates FFTW's global state; ESTIMATE plans are deterministic.
  detail::FftwPlan fwd(fftw_plan_dft_r2c_1d(static_cast<int>(nfft), buf.get(), spec.get(), FFTW_ESTIMATE));
  std::fill(buf.get(), buf.get() + nfft, 0.0);
  std::copy(force.values.begin(), force.values.end(), buf.get());
  fftw_execute(fwd.get());

  const auto& basis = model.basis();
  std::vector<double> shape_at(basis.size());
  for (std::size_t n = 1; n <= basis.size(); ++n) shape_at[n - 1] = basis.shape(n, x_obs);

  const double domega = 2.0 * kPi / (static_cast<double>(nfft) * dt);
  for (std::size_t k = 0; k < nbins; ++k) {
    // F_hat(omega_k) / (2 pi) with F_hat approximated by dt * DFT.
    const Complex fhat(spec.get()[k][0] * dt, spec.get()[k][1] * dt);
    const auto r = harmonic_response(model, domega * static_cast<double>(k), fhat / (2.0 * kPi));
    Complex w = 0.0;
    for (std::size_t n = 0; n < basis.size(); ++n) w += r.modal[n] * shape_at[n];
    Complex v = r.voltage;
    if (k == 0 || (k == nbins - 1 && nfft % 2 == 0)) {
      // DC and Nyquist bins of a real signal are real.
      v = v.real();
      w = w.real();
    }
    vspec.get()[k][0] = v.real();
    vspec.get()[k][1] = v.imag();
    wspec.get()[k][0] = w.real();
    wspec.get()[k][1] = w.imag();
  }

  TimeResponse out;
  out.observe_at = x_obs;
  out.time.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) out.time[i] = force.start + dt * static_cast<double>(i);

  // V(t) = sum_r V_r e^{j w_r t} d_omega; the sum over bins is a backward DFT.
  auto inverse = [&](fftw_complex* in, std::vector<double>& dst) {
    detail::FftwPlan bwd(fftw_plan_dft_c2r_1d(static_cast<int>(nfft), in, buf.get(), FFTW_ESTIMATE));
    fftw_execute(bwd.get());
    dst.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) dst[i] = buf.get()[i] * domega;
  };
  inverse(vspec.get(), out.voltage);
  inverse(wspec.get(), out.deflection);
  return out;
}

// ---------------------------------------------------------------------------
// Impulse peak estimates

/// Which Psi the impulse estimates sum: the resonant (modal-assumption) form
/// or the full expression evaluated at each natural frequency.
enum class PsiForm { resonant, full };

inline const char* to_string(PsiForm f) { return f == PsiForm::resonant ? "resonant" : "full"; }

struct PeakOptions {
  PsiForm form = PsiForm::resonant;
  std::size_t grid_points = 401;
};

struct ImpulsePeaks {
  double voltage = 0.0;     // V
  double deflection = 0.0;  // m
  double strain = 0.0;      // (-)
  double deflection_at = 0.0;  // x of max |w|
  double strain_at = 0.0;      // x of max |eps| on the piezo surface
  std::vector<Complex> psi;    // Psi(omega_n)
  std::vector<Complex> modal;  // peak modal amplitudes (per unit impulse)
};

inline Complex psi_at(const HarvesterModel& model, double omega, PsiForm form) {
  return form == PsiForm::resonant ? psi_resonant(model, omega) : psi(model, omega);
}

/// Peak voltage, deflection and piezo-surface strain after an impulse of
/// magnitude `impulse`, from the modal sums evaluated at the natural frequencies.
inline ImpulsePeaks impulse_peak_estimates(const HarvesterModel& model, double impulse, const PeakOptions& opt = {}) {
  const auto& basis = model.basis();
  const std::size_t N = basis.size();
  ImpulsePeaks p;
  p.psi.resize(N);
  p.modal.resize(N);
  Complex vsum = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const auto& m = basis.mode(n);
    const Complex ps = psi_at(model, m.omega, opt.form);
    p.psi[n - 1] = ps;
    vsum += ps;
    const Complex a = 1.0 / Complex(0.0, 2.0 * m.zeta * m.omega * m.omega);
    p.modal[n - 1] = a * (m.sigma / model.mass_per_length() - m.gamma * ps) / (2.0 * kPi);
  }
  const double scale = std::abs(impulse);
  p.voltage = scale * std::abs(vsum) / (2.0 * kPi);

  const std::size_t G = std::max<std::size_t>(opt.grid_points, 2);
  const double L = basis.length();
  for (std::size_t i = 0; i < G; ++i) {
    const double x = L * static_cast<double>(i) / static_cast<double>(G - 1);
    const double w = std::abs(deflection(basis, p.modal, x));
    if (w > p.deflection) {
      p.deflection = w;
      p.deflection_at = x;
    }
  }
  p.deflection *= scale;

  const double z = std::abs(model.laminate().piezo_outer_surface());
  const double xi = basis.piezo_start(), xf = basis.piezo_end();
  for (std::size_t i = 0; i < G; ++i) {
    const double x = xi + (xf - xi) * static_cast<double>(i) / static_cast<double>(G - 1);
    const double e = z * std::abs(curvature(basis, p.modal, x));
    if (e > p.strain) {
      p.strain = e;
      p.strain_at = x;
    }
  }
  p.strain *= scale;
  return p;
}

}  // namespace fpbh
