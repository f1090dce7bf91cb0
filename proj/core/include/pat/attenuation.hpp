#pragma once

// Complex frequency-dependent attenuation laws alpha(omega) and numerical
// checks of the weak-causality axioms: Hermitian symmetry, monotone real
// part, and the once-subtracted Kramers-Kronig relation.
//
// Units: omega in rad/s, alpha in 1/m. Coefficients carry whatever units
// make alpha dimensionally 1/m.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pat {

using Complex = std::complex<double>;

struct ZeroLaw {};

/// a0 (-i w)^gamma + b0 (-i w)
struct PowerLaw {
  double a0 = 0.0;
  double b0 = 0.0;
  double gamma = 1.5;
};

/// Kowar-Scherzer-Bonnefond model, gamma in (1, 2].
struct KsbLaw {
  double a0 = 0.0;
  double b0 = 0.0;
  double c_inf = 1623.0;
  double tau1 = 1e-7;
  double gamma = 2.0;
};

/// Nachman-Smith-Waag model with one relaxation process. Requires c0 < c_inf.
struct NswLaw {
  double c0 = 1540.0;
  double c_inf = 1623.0;
  double tau1 = 1e-7;
};

class AttenuationLaw {
 public:
  using Variant = std::variant<ZeroLaw, PowerLaw, KsbLaw, NswLaw>;

  /// Validates the parameters; throws ConfigError on violation.
  AttenuationLaw(Variant v = ZeroLaw{});

  static AttenuationLaw zero() { return AttenuationLaw(ZeroLaw{}); }

  const Variant& variant() const noexcept { return law_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroLaw>(law_); }
  /// True when the law is not strongly causal and its time kernel needs
  /// explicit causal truncation (power law with gamma > 1).
  bool needs_causal_truncation() const noexcept;

  /// Short identifier, e.g. "nsw" or "power".
  std::string tag() const;
  std::string describe() const;

  /// alpha(omega). Throws DomainError for non-finite omega.
  Complex operator()(double omega) const;

 private:
  Variant law_;
};

/// (-i w)^gamma := |w|^gamma exp(-i pi gamma sign(w) / 2), sign(0) = 0.
Complex minus_i_omega_pow(double omega, double gamma);

Complex evaluate_alpha(const AttenuationLaw& law, double omega);

/// Sorted list of angular frequencies (rad/s).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> omega);

  /// omega_l = l * 2 pi / T for l = 0..samples.
  static FrequencyGrid from_time_axis(std::size_t samples, double final_time);
  /// `count` uniformly spaced points covering [-half_span, half_span].
  static FrequencyGrid symmetric(std::size_t count, double half_span);
  /// `count` uniformly spaced points covering (0, max] (first point max/count).
  static FrequencyGrid positive(std::size_t count, double max);

  std::span<const double> values() const noexcept { return omega_; }
  std::size_t size() const noexcept { return omega_.size(); }
  bool empty() const noexcept { return omega_.empty(); }
  double operator[](std::size_t i) const { return omega_[i]; }

  bool is_uniform(double rel_tol = 1e-9) const;
  bool is_symmetric(double rel_tol = 1e-9) const;

 private:
  std::vector<double> omega_;
};

/// max over the grid of |alpha(-w) - conj(alpha(w))| / (1 + |alpha(w)|).
double check_hermitian_symmetry(const AttenuationLaw& law, const FrequencyGrid& grid);

struct MonotoneReport {
  bool monotone = true;
  /// Index l of the first pair (l, l+1) where Re alpha decreases.
  std::optional<std::size_t> first_violation;
};

/// Checks Re alpha nondecreasing on a sorted, positive grid within
/// 1e-12 * max |Re alpha|. The generic overload accepts any sampled law.
MonotoneReport check_monotone_real(const AttenuationLaw& law, const FrequencyGrid& grid);
MonotoneReport check_monotone_real(std::span<const double> real_part,
                                   const FrequencyGrid& grid);

struct KramersKronigReport {
  double residual = 0.0;
  /// Set when Re alpha vanishes on the evaluation window, in which case
  /// `residual` is the absolute L2 norm of the reconstructed real part.
  bool absolute = false;
  double omega0 = 0.0;
  std::size_t evaluated_points = 0;
};

/// Reconstructs Re alpha from Im alpha through the once-subtracted
/// Kramers-Kronig relation anchored at omega0 and compares it with the
/// directly evaluated real part over the inner half of the grid
/// (|w| <= half_span / 2). The principal value omits the singular node of
/// the trapezoid sum; the integral outside the grid is closed with a
/// power-law tail fitted to Im alpha at the grid edge.
KramersKronigReport kramers_kronig_residual(const AttenuationLaw& law, const FrequencyGrid& grid,
                                            double omega0);

}  // namespace pat
