#pragma once

// Direct integration of the coupled modal and circuit equations with a
// fixed-step classical Runge-Kutta scheme. Used as an oracle for the
// frequency-domain results.

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "fpbh/constants.hpp"
#include "fpbh/force.hpp"
#include "fpbh/harvester.hpp"

namespace fpbh {

/// Pi_n, dPi_n/dt, V_R at time t.
struct OdeState {
  double time = 0.0;
  std::vector<double> displacement;
  std::vector<double> velocity;
  double voltage = 0.0;

  explicit OdeState(std::size_t modes = 0) : displacement(modes, 0.0), velocity(modes, 0.0) {}
  std::size_t dimension() const { return 2 * displacement.size() + 1; }
};

struct EnergyLedger {
  double input = 0.0;       // W_in (J)
  double damping = 0.0;     // W_damp (J)
  double electrical = 0.0;  // W_R (J)
  double coupling_mech = 0.0;  // work done on the beam by the piezo term (J)
  double coupling_elec = 0.0;  // work delivered to the circuit by the current source (J)
};

struct Trajectory {
  std::vector<double> time;
  std::vector<double> voltage;
  std::vector<double> modal;  // row-major, mode_count values per sample
  std::vector<double> stored_mech;  // E_mech(t)
  std::vector<double> stored_elec;  // 1/2 C V^2
  std::vector<EnergyLedger> ledger;  // cumulative work at each sample
  std::size_t mode_count = 0;
  double step = 0.0;
  OdeState final_state;

  std::size_t size() const { return time.size(); }
  double modal_at(std::size_t sample, std::size_t n) const { return modal[sample * mode_count + (n - 1)]; }
  double peak_voltage() const {
    double p = 0.0;
    for (double v : voltage) p = std::max(p, std::abs(v));
    return p;
  }
};

struct IntegrateOptions {
  std::size_t record_stride = 1;  // keep every k-th step
  double max_growth = 2.0;        // reject if stored energy exceeds this multiple of the energy supplied
};

/// Shortest modal period over 20, the largest step `integrate` accepts.
inline double max_time_step(const HarvesterModel& model) {
  double wmax = 0.0;
  for (const auto& m : model.basis().modes()) wmax = std::max(wmax, m.omega);
  return 2.0 * kPi / wmax / 20.0;
}

/// Step that also resolves the circuit time constant R_eff C_eff.
inline double recommended_time_step(const HarvesterModel& model) {
  return std::min(max_time_step(model), 0.5 * model.effective_resistance() * model.effective_capacitance());
}

namespace detail {

// y = [Pi_1..N, dPi_1..N, V, W_in, W_damp, W_R, W_cm, W_ce]
class CoupledSystem {
 public:
  static constexpr std::size_t kAccumulators = 5;

  explicit CoupledSystem(const HarvesterModel& model)
      : n_(model.mode_count()),
        mass_(model.mass_per_length()),
        cap_(model.effective_capacitance()),
        res_(model.effective_resistance()) {
    for (const auto& m : model.basis().modes()) modes_.push_back(m);
  }

  std::size_t size() const { return 2 * n_ + 1 + kAccumulators; }

  void rhs(double force, const std::vector<double>& y, std::vector<double>& dy) const {
    const double V = y[2 * n_];
    double current = 0.0, fin = 0.0, damp = 0.0, cm = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& m = modes_[i];
      const double q = y[i], qd = y[n_ + i];
      dy[i] = qd;
      dy[n_ + i] = m.sigma * force / mass_ - 2.0 * m.zeta * m.omega * qd - m.omega * m.omega * q - m.gamma * V;
      current += m.lambda * qd;
      fin += m.sigma * qd;
      damp += 2.0 * m.zeta * m.omega * qd * qd;
      cm += m.gamma * qd;
    }
    dy[2 * n_] = (current - V / res_) / cap_;
    dy[2 * n_ + 1] = force * fin;
    dy[2 * n_ + 2] = mass_ * damp;
    dy[2 * n_ + 3] = V * V / res_;
    dy[2 * n_ + 4] = mass_ * V * cm;
    dy[2 * n_ + 5] = V * current;
  }

  void kick(double impulse, std::vector<double>& y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const double before = y[n_ + i];
      y[n_ + i] += modes_[i].sigma * impulse / mass_;
      y[2 * n_ + 1] += 0.5 * mass_ * (y[n_ + i] * y[n_ + i] - before * before);
    }
  }

  double stored_mech(const std::vector<double>& y) const {
    double e = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      e += 0.5 * mass_ * (y[n_ + i] * y[n_ + i] + modes_[i].omega * modes_[i].omega * y[i] * y[i]);
    return e;
  }
  double stored_elec(const std::vector<double>& y) const { return 0.5 * cap_ * y[2 * n_] * y[2 * n_]; }

  EnergyLedger ledger(const std::vector<double>& y) const {
    return {y[2 * n_ + 1], y[2 * n_ + 2], y[2 * n_ + 3], y[2 * n_ + 4], y[2 * n_ + 5]};
  }

  std::size_t modes() const { return n_; }

 private:
  std::size_t n_;
  double mass_, cap_, res_;
  std::vector<Mode> modes_;
};

inline double force_at(const ForceSignal& f, double t) {
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Impulse>) return 0.0;
        else return s.at(t);
      },
      f);
}

}  // namespace detail

/// Fixed-step RK4 from rest at t = 0 to t_end. Impulses are applied as a
/// velocity jump dPi_n += sigma_n F0 / m* at exactly t0 (a shortened step
/// lands on t0 if it is off the grid).
inline Trajectory integrate(const HarvesterModel& model, const ForceSignal& force, double t_end, double dt,
                            const IntegrateOptions& opt = {}) {
  if (!(t_end > 0.0)) throw ValidationError("solver.t_end", "must be positive");
  const double dt_max = max_time_step(model);
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12))
    throw ValidationError("solver.dt", "step " + std::to_string(dt) + " s exceeds T_N/20; need dt <= " +
                                           std::to_string(dt_max) + " s");
  if (const auto* s = std::get_if<SampledForce>(&force)) s->validate();

  const detail::CoupledSystem sys(model);
  const std::size_t N = sys.modes();
  std::vector<double> y(sys.size(), 0.0), k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());

  const auto* impulse = std::get_if<Impulse>(&force);
  bool kicked = impulse == nullptr || impulse->time > t_end;

  Trajectory tr;
  tr.mode_count = N;
  tr.step = dt;
  const std::size_t stride = std::max<std::size_t>(opt.record_stride, 1);
  auto record = [&](double t) {
    tr.time.push_back(t);
    tr.voltage.push_back(y[2 * N]);
    tr.modal.insert(tr.modal.end(), y.begin(), y.begin() + static_cast<std::ptrdiff_t>(N));
    tr.stored_mech.push_back(sys.stored_mech(y));
    tr.stored_elec.push_back(sys.stored_elec(y));
    tr.ledger.push_back(sys.ledger(y));
  };

  auto step = [&](double t, double h) {
    const double f0 = detail::force_at(force, t);
    const double fh = detail::force_at(force, t + 0.5 * h);
    const double f1 = detail::force_at(force, t + h);
    sys.rhs(f0, y, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys.rhs(fh, tmp, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys.rhs(fh, tmp, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    sys.rhs(f1, tmp, k4);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  auto check = [&](double t) {
    const double stored = sys.stored_mech(y) + sys.stored_elec(y);
    const double supplied = std::max(y[2 * N + 1], 0.0);
    bool finite = std::isfinite(stored);
    if (!finite || stored > opt.max_growth * supplied + 1e-300) {
      throw NumericalError("energy growth at t = " + std::to_string(t) + " s; step " + std::to_string(dt) +
                           " s is unstable, use dt <= " + std::to_string(recommended_time_step(model)) + " s");
    }
  };

  double t = 0.0;
  std::size_t count = 0;
  if (!kicked && impulse->time <= 0.0) {
    sys.kick(impulse->magnitude, y);
    kicked = true;
  }
  record(t);
  const double eps = 1e-9 * dt;
  while (t < t_end - eps) {
    double h = std::min(dt, t_end - t);
    if (!kicked && t + h >= impulse->time) {
      const double part = impulse->time - t;
      if (part > eps) step(t, part);
      t = impulse->time;
      sys.kick(impulse->magnitude, y);
      kicked = true;
      h = std::min(dt, t_end - t);
      if (h <= eps) break;
    }
    step(t, h);
    t += h;
    ++count;
    if (count % 64 == 0) check(t);
    if (count % stride == 0 || t >= t_end - eps) record(t);
  }
  check(t);

  tr.final_state = OdeState(N);
  tr.final_state.time = t;
  for (std::size_t i = 0; i < N; ++i) {
    tr.final_state.displacement[i] = y[i];
    tr.final_state.velocity[i] = y[N + i];
  }
  tr.final_state.voltage = y[2 * N];
  return tr;
}

struct EnergyAudit {
  double input = 0.0;          // W_in (J)
  double electrical = 0.0;     // W_R (J)
  double damping = 0.0;        // W_damp (J)
  double stored_mech = 0.0;    // E_mech(t_end) (J)
  double stored_elec = 0.0;    // 1/2 C V(t_end)^2 (J)
  double coupling_mismatch = 0.0;  // work through the piezo term not matched on the circuit side (J)
  std::vector<double> mech_history;  // E_mech(t)

  /// (W_in - W_R - W_damp - E_mech - E_elec - mismatch) / W_in
  double residual() const {
    const double out = electrical + damping + stored_mech + stored_elec + coupling_mismatch;
    return input != 0.0 ? (input - out) / input : out;
  }
  bool passive(double rel = 1e-6) const { return electrical <= input + rel * std::abs(input); }
};

/// Work and energy balance of a trajectory. With a conservative coupling
/// (m* gamma_n = Lambda_n) the mismatch term is zero.
inline EnergyAudit energy_audit(const Trajectory& tr, const HarvesterModel& /*model*/, const ForceSignal& /*force*/) {
  EnergyAudit a;
  if (tr.size() == 0) return a;
  const auto& l = tr.ledger.back();
  a.input = l.input;
  a.electrical = l.electrical;
  a.damping = l.damping;
  a.stored_mech = tr.stored_mech.back();
  a.stored_elec = tr.stored_elec.back();
  a.coupling_mismatch = l.coupling_mech - l.coupling_elec;
  a.mech_history = tr.stored_mech;
  return a;
}

/// Least-squares fit of a cos(omega t) + b sin(omega t) + c over the samples
/// with t >= t_from; returns the amplitude sqrt(a^2 + b^2).
inline double harmonic_amplitude(const std::vector<double>& t, const std::vector<double>& v, double omega,
                                 double t_from) {
  std::array<std::array<double, 4>, 3> A{};
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from) continue;
    const std::array<double, 3> row{std::cos(omega * t[i]), std::sin(omega * t[i]), 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) A[r][c] += row[r] * row[c];
      A[r][3] += row[r] * v[i];
    }
  }
  // Gaussian elimination with partial pivoting on the 3x3 normal equations.
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[p], A[c]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double s = A[r][3];
    for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return std::hypot(x[0], x[1]);
}

/// Steady-state voltage amplitude under a harmonic force of unit amplitude,
/// found by integrating through the transient.
inline double simulated_harmonic_voltage(const HarvesterModel& model, double omega, double amplitude = 1.0,
                                         double settle_decays = 18.0, double measure_periods = 20.0) {
  double slow = 1e300;
  for (const auto& m : model.basis().modes()) slow = std::min(slow, m.zeta * m.omega);
  slow = std::min(slow, 1.0 / (model.effective_resistance() * model.effective_capacitance()));
  const double period = 2.0 * kPi / omega;
  const double t_settle = settle_decays / slow;
  const double t_end = t_settle + measure_periods * period;
  // Resolve both the force period and the modal/circuit dynamics.
  double dt = std::min(recommended_time_step(model), period / 40.0);
  IntegrateOptions opt;
  opt.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(period / 40.0 / dt));
  const auto tr = integrate(model, HarmonicForce{amplitude, omega, 0.0}, t_end, dt, opt);
  return harmonic_amplitude(tr.time, tr.voltage, omega, t_settle);
}

/// CSV export: t, V_R, Pi_1..Pi_N.
template <class Writer>
void write_trajectory(Writer& w, const Trajectory& tr) {
  std::vector<std::string> header{"t [s]", "V_R [V]"};
  for (std::size_t n = 1; n <= tr.mode_count; ++n) header.push_back("Pi_" + std::to_string(n) + " [m^1.5]");
  w.header(header);
  std::vector<double> row(2 + tr.mode_count);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    row[0] = tr.time[i];
    row[1] = tr.voltage[i];
    for (std::size_t n = 1; n <= tr.mode_count; ++n) row[1 + n] = tr.modal_at(i, n);
    w.row(row);
  }
}

}  // namespace fpbh
