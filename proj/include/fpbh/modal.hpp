#pragma once

// Modal bases for the four-point-bending (pinned-pinned) beam and the
// clamped-free cantilever used for comparison studies.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpbh/constants.hpp"
#include "fpbh/error.hpp"
#include "fpbh/laminate.hpp"

namespace fpbh {

/// Support/load layout of the four-point-bending fixture. Supports sit at
/// x = 0 and x = L_T; the two load lines sit at x = a1 and x = L_T - a2.
struct FpbGeometry {
  double total_length = 0.0;    // L_T (m)
  double overhang_left = 0.0;   // a1 (m)
  double overhang_right = 0.0;  // a2 (m)
  double load_split = 0.0;      // U1 (m); share of F at the right load line is U1/L
  double piezo_start = 0.0;     // x_i (m)
  double piezo_end = 0.0;       // x_f (m)

  /// Symmetric layout with load span kappa*L_T and a centered piezo of length theta*L_T.
  static FpbGeometry symmetric(double total_length, double kappa, double theta) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("geometry.kappa", "kappa must lie in (0, 1)");
    if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("geometry.theta", "theta must lie in (0, 1]");
    FpbGeometry g;
    g.total_length = total_length;
    g.overhang_left = g.overhang_right = 0.5 * (1.0 - kappa) * total_length;
    g.load_split = 0.5 * kappa * total_length;
    g.piezo_start = 0.5 * (1.0 - theta) * total_length;
    g.piezo_end = total_length - g.piezo_start;
    g.validate();
    return g;
  }

  double inner_span() const { return total_length - overhang_left - overhang_right; }
  double kappa() const { return inner_span() / total_length; }
  double theta() const { return (piezo_end - piezo_start) / total_length; }
  bool is_symmetric(double tol = 1e-12) const {
    return std::abs(overhang_left - overhang_right) <= tol * total_length &&
           std::abs(load_split - 0.5 * inner_span()) <= tol * total_length;
  }

  void validate() const {
    if (!(total_length > 0.0) || !std::isfinite(total_length))
      throw ValidationError("geometry.total_length", "must be positive");
    if (overhang_left < 0.0) throw ValidationError("geometry.a1", "must be non-negative");
    if (overhang_right < 0.0) throw ValidationError("geometry.a2", "must be non-negative");
    if (!(overhang_left + overhang_right < total_length))
      throw ValidationError("geometry", "a1 + a2 must be smaller than L_T");
    if (load_split < 0.0 || load_split > inner_span())
      throw ValidationError("geometry.u1", "U1 must lie within the inner span [0, L]");
    if (!(piezo_start >= 0.0 && piezo_start < piezo_end && piezo_end <= total_length * (1.0 + 1e-12)))
      throw ValidationError("geometry.piezo_span", "need 0 <= x_i < x_f <= L_T");
  }
};

enum class BoundaryKind { pinned_pinned, clamped_free };

inline const char* to_string(BoundaryKind k) {
  return k == BoundaryKind::pinned_pinned ? "fpb-pinned-pinned" : "clamped-free";
}

/// Modal damping: explicit ratios (one per mode, or a single value for all)
/// or a viscous coefficient c_a converted with zeta_n = c_a / (2 m* omega_n).
struct Damping {
  std::vector<double> ratios;
  std::optional<double> viscous;  // N s/m^2

  static Damping uniform(double zeta) { return {{zeta}, std::nullopt}; }
  static Damping per_mode(std::vector<double> z) { return {std::move(z), std::nullopt}; }
  static Damping from_viscous(double c_a) { return {{}, c_a}; }

  double ratio(std::size_t mode_index, double omega, double mass_per_length) const {
    if (viscous) return *viscous / (2.0 * mass_per_length * omega);
    return ratios.size() == 1 ? ratios.front() : ratios.at(mode_index);
  }

  void validate(std::size_t modes) const {
    if (viscous) {
      if (!(*viscous > 0.0)) throw ValidationError("damping.viscous", "c_a must be positive");
      return;
    }
    if (ratios.empty()) throw ValidationError("damping.ratios", "no damping given");
    if (ratios.size() != 1 && ratios.size() < modes)
      throw ValidationError("damping.ratios", "need one ratio or at least " + std::to_string(modes) +
                                                  " ratios, got " + std::to_string(ratios.size()));
    for (std::size_t i = 0; i < ratios.size(); ++i)
      if (!(ratios[i] > 0.0 && ratios[i] < 1.0))
        throw ValidationError("damping.ratios[" + std::to_string(i) + "]", "must lie in (0, 1)");
  }
};

/// Per-mode quantities. `wavenumber` is beta_n with omega_n = beta_n^2 sqrt(YI/m*).
struct Mode {
  double wavenumber = 0.0;  // 1/m
  double omega = 0.0;       // rad/s
  double zeta = 0.0;
  double norm = 0.0;        // C_n (1/sqrt(m))
  double sigma = 0.0;       // force coefficient (1/sqrt(m))
  double gamma = 0.0;       // electromechanical coupling in the mechanical equation
  double lambda = 0.0;      // electrical coupling (current source weight)
  double shape_ratio = 0.0;  // clamped-free only: (sinh bL - sin bL)/(cosh bL + cos bL)
  double one_minus_ratio = 0.0;  // clamped-free only: 1 - shape_ratio, kept separately for precision
};

/// Eigen-shapes, frequencies and coupling coefficients for one boundary kind.
/// Mode indices in the public API are 1-based.
class ModalBasis {
 public:
  ModalBasis(BoundaryKind kind, double length, double piezo_start, double piezo_end, std::vector<Mode> modes)
      : kind_(kind), length_(length), piezo_start_(piezo_start), piezo_end_(piezo_end), modes_(std::move(modes)) {}

  BoundaryKind kind() const { return kind_; }
  double length() const { return length_; }
  double piezo_start() const { return piezo_start_; }
  double piezo_end() const { return piezo_end_; }
  std::size_t size() const { return modes_.size(); }
  std::span<const Mode> modes() const { return modes_; }
  const Mode& mode(std::size_t n) const {
    check_index(n);
    return modes_[n - 1];
  }

  /// phi_n(x)
  double shape(std::size_t n, double x) const { return derivative(n, x, 0); }
  /// d phi_n / dx
  double slope(std::size_t n, double x) const { return derivative(n, x, 1); }
  /// d^2 phi_n / dx^2
  double curvature(std::size_t n, double x) const { return derivative(n, x, 2); }

  /// k-th spatial derivative of phi_n at x (k = 0..3).
  double derivative(std::size_t n, double x, int k) const {
    check_index(n);
    if (!(x >= -1e-12 * length_ && x <= length_ * (1.0 + 1e-12)))
      throw ValidationError("x", "position outside [0, L]");
    return raw_derivative(modes_[n - 1], x, k);
  }

  /// [d phi_n/dx] evaluated between a and b.
  double slope_jump(std::size_t n, double a, double b) const { return slope(n, b) - slope(n, a); }

  /// Replace force coefficients (geometry change with the same beam and piezo).
  ModalBasis with_force_coefficients(std::span<const double> sigma) const {
    ModalBasis out = *this;
    for (std::size_t i = 0; i < out.modes_.size(); ++i) out.modes_[i].sigma = sigma[i];
    return out;
  }

  static double raw_derivative(const Mode& m, double x, int k, BoundaryKind kind) {
    const double b = m.wavenumber;
    const double a = b * x;
    const double scale = m.norm * std::pow(b, k);
    if (kind == BoundaryKind::pinned_pinned) {
      switch (k & 3) {
        case 0: return scale * std::sin(a);
        case 1: return scale * std::cos(a);
        case 2: return -scale * std::sin(a);
        default: return -scale * std::cos(a);
      }
    }
    // cosh a - s sinh a = ((1-s) e^a + (1+s) e^-a) / 2, evaluated without cancellation.
    const double s = m.shape_ratio;
    const double ea = std::exp(a), ema = std::exp(-a);
    const double ch_s = 0.5 * (m.one_minus_ratio * ea + (1.0 + s) * ema);   // cosh - s sinh
    const double sh_s = 0.5 * (m.one_minus_ratio * ea - (1.0 + s) * ema);   // sinh - s cosh
    const double c = std::cos(a), sn = std::sin(a);
    switch (k & 3) {
      case 0: return scale * (ch_s - c + s * sn);
      case 1: return scale * (sh_s + sn + s * c);
      case 2: return scale * (ch_s + c - s * sn);
      default: return scale * (sh_s - sn - s * c);
    }
  }

 private:
  double raw_derivative(const Mode& m, double x, int k) const { return raw_derivative(m, x, k, kind_); }

  void check_index(std::size_t n) const {
    if (n < 1 || n > modes_.size())
      throw ValidationError("mode", "mode index " + std::to_string(n) + " outside 1.." + std::to_string(modes_.size()));
  }

  BoundaryKind kind_;
  double length_;
  double piezo_start_;
  double piezo_end_;
  std::vector<Mode> modes_;
};

inline double mode_shape(const ModalBasis& basis, std::size_t n, double x) { return basis.shape(n, x); }

namespace detail {

inline void fill_couplings(std::vector<Mode>& modes, BoundaryKind kind, const Laminate& lam, double x_i,
                           double x_f) {
  const double m = lam.mass_per_length();
  const double P = lam.coupling_factor();
  const double elec = -lam.piezo_offset() * lam.e31() * lam.width();
  for (auto& mode : modes) {
    const double jump = ModalBasis::raw_derivative(mode, x_f, 1, kind) - ModalBasis::raw_derivative(mode, x_i, 1, kind);
    mode.gamma = P / m * jump;
    mode.lambda = elec * jump;
  }
}

inline void check_count(std::size_t n) {
  if (n < 1) throw ValidationError("solver.modes", "mode count must be at least 1");
}

}  // namespace detail

/// sigma_n = -[(1 - U1/L) phi_n(a1) + (U1/L) phi_n(L_T - a2)].
inline std::vector<double> force_coefficients(const ModalBasis& basis, const FpbGeometry& geom) {
  if (basis.kind() != BoundaryKind::pinned_pinned)
    throw ValidationError("basis", "force coefficients of this form need a pinned-pinned basis");
  if (std::abs(basis.length() - geom.total_length) > 1e-12 * geom.total_length)
    throw ValidationError("geometry.total_length", "basis and geometry lengths differ");
  const double L = geom.inner_span();
  const double right_share = geom.load_split / L;
  std::vector<double> sigma(basis.size());
  for (std::size_t n = 1; n <= basis.size(); ++n) {
    sigma[n - 1] = -((1.0 - right_share) * basis.shape(n, geom.overhang_left) +
                     right_share * basis.shape(n, geom.total_length - geom.overhang_right));
  }
  return sigma;
}

/// Pinned-pinned basis with phi_n = sqrt(2/L_T) sin(n pi x / L_T).
inline ModalBasis fpb_basis(const FpbGeometry& geom, const Laminate& lam, const Damping& damping, std::size_t count) {
  geom.validate();
  detail::check_count(count);
  damping.validate(count);
  const double LT = geom.total_length;
  const double speed = std::sqrt(lam.bending_stiffness() / lam.mass_per_length());
  std::vector<Mode> modes(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& m = modes[i];
    m.wavenumber = static_cast<double>(i + 1) * kPi / LT;
    m.omega = m.wavenumber * m.wavenumber * speed;
    m.zeta = damping.ratio(i, m.omega, lam.mass_per_length());
    if (!(m.zeta > 0.0 && m.zeta < 1.0))
      throw ValidationError("damping", "derived damping ratio of mode " + std::to_string(i + 1) + " outside (0, 1)");
    m.norm = std::sqrt(2.0 / LT);
  }
  detail::fill_couplings(modes, BoundaryKind::pinned_pinned, lam, geom.piezo_start, geom.piezo_end);
  ModalBasis basis(BoundaryKind::pinned_pinned, LT, geom.piezo_start, geom.piezo_end, std::move(modes));
  const auto sigma = force_coefficients(basis, geom);
  return basis.with_force_coefficients(sigma);
}

/// Roots of cos(x) cosh(x) + 1 = 0 by bisection, one per bracket (k pi, (k + 1) pi).
inline std::vector<double> cantilever_eigenvalues(std::size_t count, double tol = 1e-12) {
  std::vector<double> roots(count);
  // cos x + 1/cosh x has the same roots and stays bounded.
  auto f = [](double x) { return std::cos(x) + 1.0 / std::cosh(x); };
  for (std::size_t k = 0; k < count; ++k) {
    double lo = static_cast<double>(k) * kPi;
    double hi = lo + kPi;
    double flo = f(lo);
    while (hi - lo > tol * hi) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots[k] = 0.5 * (lo + hi);
  }
  return roots;
}

/// Clamped at x = 0, free at x = length, single point load at `load_position`.
/// Shapes are normalized so that the integral of phi_n^2 over the beam is 1.
inline ModalBasis cantilever_basis(double length, const Laminate& lam, const Damping& damping, std::size_t count,
                                   double load_position, double piezo_start, double piezo_end) {
  if (!(length > 0.0)) throw ValidationError("cantilever.length", "must be positive");
  if (!(load_position > 0.0 && load_position <= length * (1.0 + 1e-12)))
    throw ValidationError("cantilever.load_position", "load must act on the beam (0, length]");
  if (!(piezo_start >= 0.0 && piezo_start < piezo_end && piezo_end <= length * (1.0 + 1e-12)))
    throw ValidationError("cantilever.piezo_span", "need 0 <= x_i < x_f <= length");
  detail::check_count(count);
  damping.validate(count);
  const auto roots = cantilever_eigenvalues(count);
  const double speed = std::sqrt(lam.bending_stiffness() / lam.mass_per_length());
  std::vector<Mode> modes(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& m = modes[i];
    const double bl = roots[i];
    m.wavenumber = bl / length;
    m.omega = m.wavenumber * m.wavenumber * speed;
    m.zeta = damping.ratio(i, m.omega, lam.mass_per_length());
    if (!(m.zeta > 0.0 && m.zeta < 1.0))
      throw ValidationError("damping", "derived damping ratio of mode " + std::to_string(i + 1) + " outside (0, 1)");
    // s = (sinh - sin)/(cosh + cos); 1 - s = (e^-bl + cos + sin)/(cosh + cos).
    const double denom = std::cosh(bl) + std::cos(bl);
    m.shape_ratio = (std::sinh(bl) - std::sin(bl)) / denom;
    m.one_minus_ratio = (std::exp(-bl) + std::cos(bl) + std::sin(bl)) / denom;
    m.norm = 1.0 / std::sqrt(length);
  }
  detail::fill_couplings(modes, BoundaryKind::clamped_free, lam, piezo_start, piezo_end);
  for (auto& m : modes) m.sigma = -ModalBasis::raw_derivative(m, load_position, 0, BoundaryKind::clamped_free);
  return ModalBasis(BoundaryKind::clamped_free, length, piezo_start, piezo_end, std::move(modes));
}

}  // namespace fpbh
