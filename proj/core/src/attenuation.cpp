#include "pat/attenuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "pat/error.hpp"

namespace pat {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("attenuation law: " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

void validate(const AttenuationLaw::Variant& v) {
  std::visit(Overloaded{
                 [](const ZeroLaw&) {},
                 [](const PowerLaw& p) {
                   require(finite_nonneg(p.a0), "power law a0 must be finite and >= 0");
                   require(finite_nonneg(p.b0), "power law b0 must be finite and >= 0");
                   require(finite_pos(p.gamma), "power law gamma must be positive");
                 },
                 [](const KsbLaw& k) {
                   require(finite_nonneg(k.a0), "KSB a0 must be finite and >= 0");
                   require(finite_nonneg(k.b0), "KSB b0 must be finite and >= 0");
                   require(finite_pos(k.c_inf), "KSB c_inf must be positive");
                   require(finite_pos(k.tau1), "KSB tau1 must be positive");
                   require(std::isfinite(k.gamma) && k.gamma > 1.0 && k.gamma <= 2.0,
                           "KSB gamma must lie in (1, 2]");
                 },
                 [](const NswLaw& n) {
                   require(finite_pos(n.c0), "NSW c0 must be positive");
                   require(finite_pos(n.c_inf), "NSW c_inf must be positive");
                   require(finite_pos(n.tau1), "NSW tau1 must be positive");
                   require(n.c0 < n.c_inf, "NSW requires c0 < c_inf");
                 },
             },
             v);
}

Complex minus_i_omega(double omega) { return {0.0, -omega}; }

}  // namespace

AttenuationLaw::AttenuationLaw(Variant v) : law_(std::move(v)) { validate(law_); }

bool AttenuationLaw::needs_causal_truncation() const noexcept {
  if (const auto* p = std::get_if<PowerLaw>(&law_)) return p->a0 > 0.0 && p->gamma >= 1.0;
  return false;
}

std::string AttenuationLaw::tag() const {
  return std::visit(Overloaded{
                        [](const ZeroLaw&) { return std::string("zero"); },
                        [](const PowerLaw&) { return std::string("power"); },
                        [](const KsbLaw&) { return std::string("ksb"); },
                        [](const NswLaw&) { return std::string("nsw"); },
                    },
                    law_);
}

std::string AttenuationLaw::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(Overloaded{
                 [&](const ZeroLaw&) { os << "zero"; },
                 [&](const PowerLaw& p) {
                   os << "power{a0=" << p.a0 << ", b0=" << p.b0 << ", gamma=" << p.gamma << "}";
                 },
                 [&](const KsbLaw& k) {
                   os << "ksb{a0=" << k.a0 << ", b0=" << k.b0 << ", c_inf=" << k.c_inf
                      << ", tau1=" << k.tau1 << ", gamma=" << k.gamma << "}";
                 },
                 [&](const NswLaw& n) {
                   os << "nsw{c0=" << n.c0 << ", c_inf=" << n.c_inf << ", tau1=" << n.tau1 << "}";
                 },
             },
             law_);
  return os.str();
}

Complex minus_i_omega_pow(double omega, double gamma) {
  if (omega == 0.0) return {0.0, 0.0};
  const double sign = omega > 0.0 ? 1.0 : -1.0;
  return std::pow(std::abs(omega), gamma) * std::polar(1.0, -kPi * gamma * sign / 2.0);
}

Complex AttenuationLaw::operator()(double omega) const {
  if (!std::isfinite(omega)) throw DomainError("evaluate_alpha: non-finite frequency");
  if (omega == 0.0) return {0.0, 0.0};
  return std::visit(
      Overloaded{
          [](const ZeroLaw&) { return Complex{0.0, 0.0}; },
          [omega](const PowerLaw& p) {
            return p.a0 * minus_i_omega_pow(omega, p.gamma) + p.b0 * minus_i_omega(omega);
          },
          [omega](const KsbLaw& k) {
            const Complex relax = minus_i_omega_pow(k.tau1 * omega, k.gamma - 1.0);
            return k.a0 * minus_i_omega(omega) / (k.c_inf * std::sqrt(1.0 + relax)) +
                   k.b0 * minus_i_omega(omega);
          },
          [omega](const NswLaw& n) {
            const Complex z = minus_i_omega(n.tau1 * omega);
            const double ratio = n.c0 / n.c_inf;
            const Complex root = std::sqrt((1.0 + ratio * ratio * z) / (1.0 + z));
            return minus_i_omega(omega) / n.c_inf * (root / ratio - 1.0);
          },
      },
      law_);
}

Complex evaluate_alpha(const AttenuationLaw& law, double omega) { return law(omega); }

// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(std::vector<double> omega) : omega_(std::move(omega)) {
  for (double w : omega_) {
    if (!std::isfinite(w)) throw DomainError("FrequencyGrid: non-finite frequency");
  }
  if (!std::is_sorted(omega_.begin(), omega_.end()))
    throw DomainError("FrequencyGrid: frequencies must be sorted ascending");
}

FrequencyGrid FrequencyGrid::from_time_axis(std::size_t samples, double final_time) {
  if (!(final_time > 0.0)) throw DomainError("FrequencyGrid: final time must be positive");
  const double step = 2.0 * kPi / final_time;
  std::vector<double> w(samples + 1);
  for (std::size_t l = 0; l <= samples; ++l) w[l] = static_cast<double>(l) * step;
  return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::symmetric(std::size_t count, double half_span) {
  if (count < 3 || !(half_span > 0.0)) throw DomainError("FrequencyGrid: bad symmetric grid");
  std::vector<double> w(count);
  const double h = 2.0 * half_span / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    // Mirror-exact construction.
    const double left = -half_span + static_cast<double>(i) * h;
    w[i] = left;
  }
  for (std::size_t i = 0; i < count / 2; ++i) w[count - 1 - i] = -w[i];
  if (count % 2 == 1) w[count / 2] = 0.0;
  return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::positive(std::size_t count, double max) {
  if (count == 0 || !(max > 0.0)) throw DomainError("FrequencyGrid: bad positive grid");
  std::vector<double> w(count);
  for (std::size_t i = 0; i < count; ++i)
    w[i] = max * static_cast<double>(i + 1) / static_cast<double>(count);
  return FrequencyGrid(std::move(w));
}

bool FrequencyGrid::is_uniform(double rel_tol) const {
  if (omega_.size() < 3) return true;
  const double h = (omega_.back() - omega_.front()) / static_cast<double>(omega_.size() - 1);
  for (std::size_t i = 1; i < omega_.size(); ++i) {
    if (std::abs(omega_[i] - omega_[i - 1] - h) > rel_tol * std::abs(h) * 1e3) return false;
  }
  return true;
}

bool FrequencyGrid::is_symmetric(double rel_tol) const {
  if (omega_.empty()) return false;
  const double scale = std::max(std::abs(omega_.front()), std::abs(omega_.back()));
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (std::abs(omega_[i] + omega_[omega_.size() - 1 - i]) > rel_tol * scale) return false;
  }
  return true;
}

double check_hermitian_symmetry(const AttenuationLaw& law, const FrequencyGrid& grid) {
  double worst = 0.0;
  for (double w : grid.values()) {
    const Complex a = law(w);
    const Complex mirrored = law(-w);
    worst = std::max(worst, std::abs(mirrored - std::conj(a)) / (1.0 + std::abs(a)));
  }
  return worst;
}

MonotoneReport check_monotone_real(std::span<const double> real_part, const FrequencyGrid& grid) {
  if (grid.empty()) throw DomainError("check_monotone_real: empty grid");
  if (real_part.size() != grid.size())
    throw DomainError("check_monotone_real: sample count does not match grid");
  if (grid[0] <= 0.0) throw DomainError("check_monotone_real: grid must be strictly positive");
  double scale = 0.0;
  for (double v : real_part) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  MonotoneReport report;
  for (std::size_t l = 0; l + 1 < real_part.size(); ++l) {
    if (real_part[l + 1] < real_part[l] - tol) {
      report.monotone = false;
      report.first_violation = l;
      break;
    }
  }
  return report;
}

MonotoneReport check_monotone_real(const AttenuationLaw& law, const FrequencyGrid& grid) {
  if (grid.empty()) throw DomainError("check_monotone_real: empty grid");
  std::vector<double> re(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) re[i] = law(grid[i]).real();
  return check_monotone_real(re, grid);
}

namespace {

// Principal-value Hilbert sum  sum_{j != i} w_j f_j / (omega_j - omega_i)
// with trapezoid weights w_j; omitting the singular node of a uniform grid
// makes the symmetric neighbours cancel the 1/(omega - omega_i) pole.
double pv_sum(std::span<const double> omega, std::span<const double> weights,
              std::span<const double> f, std::size_t i) {
  double s = 0.0;
  const double x = omega[i];
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (j == i) continue;
    s += weights[j] * f[j] / (omega[j] - x);
  }
  return s;
}

// Odd power-law continuation Im alpha(s) ~ C sign(s) |s|^p beyond |s| > edge.
struct TailModel {
  double coefficient = 0.0;
  double exponent = 0.0;
  bool active = false;
};

TailModel fit_tail(const AttenuationLaw& law, double edge) {
  const double outer = law(edge).imag();
  const double inner = law(edge / 2.0).imag();
  TailModel t;
  if (outer == 0.0 || inner == 0.0 || (outer > 0.0) != (inner > 0.0)) return t;
  t.exponent = std::log2(outer / inner);
  if (t.exponent >= 2.0) {
    throw DomainError("kramers_kronig_residual: Im alpha grows like |w|^" +
                      std::to_string(t.exponent) +
                      "; a once-subtracted relation needs growth below |w|^2");
  }
  t.coefficient = outer / std::pow(edge, t.exponent);
  t.active = true;
  return t;
}

// Integral over |s| > edge of  Im alpha(s) [1/(s - x) - 1/(s - x0)]  for the
// tail model. Substituting s = edge / v^2 maps it onto v in (0, 1] with an
// integrand that is bounded for p < 2.
double tail_difference(const TailModel& t, double edge, double x, double x0) {
  if (!t.active) return 0.0;
  const double p = t.exponent;
  const double l2 = edge * edge;
  auto integrand = [&](double v) {
    const double u = v * v;
    const double num = std::pow(edge, p + 2.0) * std::pow(v, 3.0 - 2.0 * p) * 2.0;
    const double den = (l2 - x * x * u * u) * (l2 - x0 * x0 * u * u);
    return num / den;
  };
  // For s > 0 and its mirror -s the combined kernel is
  //   2 C s^(p+1) (x^2 - x0^2) / ((s^2 - x^2)(s^2 - x0^2)).
  const double integral = boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, 1.0);
  return 2.0 * t.coefficient * (x * x - x0 * x0) * integral;
}

}  // namespace

KramersKronigReport kramers_kronig_residual(const AttenuationLaw& law, const FrequencyGrid& grid,
                                            double omega0) {
  if (grid.size() < 8) throw DomainError("kramers_kronig_residual: grid too small");
  if (!grid.is_symmetric() || !grid.is_uniform())
    throw DomainError("kramers_kronig_residual: grid must be uniform and symmetric about 0");
  const auto omega = grid.values();
  const std::size_t n = omega.size();
  const double edge = omega.back();
  if (!std::isfinite(omega0) || std::abs(omega0) >= edge)
    throw DomainError("kramers_kronig_residual: omega0 must lie inside the grid");

  std::vector<double> im(n), re(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = law(omega[i]);
    re[i] = a.real();
    im[i] = a.imag();
  }
  const double h = omega[1] - omega[0];
  std::vector<double> weights(n, h);
  weights.front() = weights.back() = h / 2.0;

  std::size_t anchor = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(omega[i] - omega0) < std::abs(omega[anchor] - omega0)) anchor = i;
  }
  const double x0 = omega[anchor];
  const TailModel tail = fit_tail(law, edge);

  // Once-subtracted relation in differenced form:
  //   Re a(w) = Re a(w0) + (1/pi) [H(w) - H(w0)],  H(x) = PV int Im a(s) / (s - x) ds,
  // which equals the subtracted integral because the constant Im a(w0)
  // term integrates to zero over the real line.
  const double h0 = pv_sum(omega, weights, im, anchor);

  KramersKronigReport report;
  report.omega0 = x0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(omega[i]) > edge / 2.0 || i == anchor) continue;
    const double hx = pv_sum(omega, weights, im, i) + tail_difference(tail, edge, omega[i], x0);
    const double reconstructed = re[anchor] + (hx - h0) / kPi;
    const double d = reconstructed - re[i];
    num += d * d;
    den += re[i] * re[i];
    ++report.evaluated_points;
  }
  if (den == 0.0) {
    report.residual = std::sqrt(num);
    report.absolute = num != 0.0;
  } else {
    report.residual = std::sqrt(num / den);
  }
  return report;
}

}  // namespace pat
