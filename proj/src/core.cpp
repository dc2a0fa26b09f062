#include "magcas/core.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace magcas {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

void require_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
}

ReducedWavevector shifted(ReducedWavevector q, Axis axis, double by) {
  switch (axis) {
    case Axis::x: q.x += by; break;
    case Axis::y: q.y += by; break;
    case Axis::z: q.z += by; break;
  }
  return q;
}

double lattice_square(double q) {
  const double s = std::sin(0.5 * q);
  return 4.0 * s * s;
}

}  // namespace

void MaterialParams::validate() const {
  require(std::isfinite(J) && J > 0.0, "J must be > 0");
  require(std::isfinite(K_e) && K_e > 0.0, "K_e must be > 0");
  require(std::isfinite(K_h) && K_h >= 0.0, "K_h must be >= 0");
  require(std::isfinite(S) && S > 0.0, "S must be > 0");
  require(std::isfinite(a) && a > 0.0, "a must be > 0");
}

MaterialParams nio() { return MaterialParams{47.1, 0.00172, 0.0395, 1.21, 0.417}; }

const char* to_string(Mode mode) { return mode == Mode::plus ? "+" : "-"; }

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::gap_melting: return "GapMelting";
    case Regime::oscillating: return "Oscillating";
    case Regime::beating: return "Beating";
  }
  return "?";
}

double DerivedParams::gap_squared() const {
  const double damped = D * alpha;
  return (delta - damped) * (delta + damped);
}

DerivedParams derive_params(const MaterialParams& m, Mode mode, double alpha) {
  m.validate();
  require_alpha(alpha);
  const double sigma = sign_of(mode);
  const double J = m.J, Ke = m.K_e, Kh = m.K_h;
  DerivedParams dp;
  dp.A = std::sqrt((1.0 + alpha * alpha) * (J * J + sigma * 0.5 * Kh * J));
  dp.delta = std::sqrt(Ke * (2.0 * J + Ke) + Kh * (J - sigma * J + Ke));
  dp.D = std::sqrt(J * J + sigma * Kh * J + 0.25 * Kh * Kh);
  dp.C = J + Ke + 0.5 * Kh;
  dp.mode = mode;
  dp.alpha = alpha;
  return dp;
}

double kinetic_term(const ReducedWavevector& q, Form form) {
  if (form == Form::continuum) return q.x * q.x + q.y * q.y + q.z * q.z;
  return lattice_square(q.x) + lattice_square(q.y) + lattice_square(q.z);
}

double e_squared(const DerivedParams& dp, const ReducedWavevector& q, Form form) {
  return dp.A * dp.A * kinetic_term(q, form) + dp.gap_squared();
}

ComplexEnergy dispersion(const DerivedParams& dp, const MaterialParams& m, const ReducedWavevector& q,
                         Form form, Branch branch) {
  const double prefactor = 2.0 * m.S / (1.0 + dp.alpha * dp.alpha);
  const double e2 = e_squared(dp, q, form);
  double root_re = 0.0;
  double root_im = 0.0;
  if (e2 >= 0.0) {
    root_re = std::sqrt(e2);
  } else {
    root_im = std::sqrt(-e2);
    if (branch == Branch::conjugate) root_im = -root_im;
  }
  return ComplexEnergy{prefactor * root_re, prefactor * (root_im - dp.alpha * dp.C)};
}

double energy_gap(const DerivedParams& dp, const MaterialParams& m) {
  const double g2 = dp.gap_squared();
  if (g2 <= 0.0 || dp.alpha >= dp.delta / dp.D) return 0.0;
  return 2.0 * m.S / (1.0 + dp.alpha * dp.alpha) * std::sqrt(g2);
}

double critical_alpha(const MaterialParams& m, Mode mode) {
  const DerivedParams dp = derive_params(m, mode, 0.0);
  return dp.delta / dp.D;
}

std::optional<double> critical_wavenumber(const MaterialParams& m, Mode mode, double alpha) {
  const DerivedParams dp = derive_params(m, mode, alpha);
  const double excess = -dp.gap_squared();
  if (alpha <= dp.delta / dp.D || excess < 0.0) return std::nullopt;
  return std::sqrt(excess) / dp.A;
}

double group_velocity(const DerivedParams& dp, const MaterialParams& m, const ReducedWavevector& q,
                      Axis axis, double step, Side side, Form form) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("step must be > 0");
  const ReducedWavevector lo = shifted(q, axis, -step);
  const ReducedWavevector hi = shifted(q, axis, step);
  const double re_lo = dispersion(dp, m, lo, form).re;
  const double re_mid = dispersion(dp, m, q, form).re;
  const double re_hi = dispersion(dp, m, hi, form).re;

  const std::array<bool, 3> inside = {e_squared(dp, lo, form) < 0.0, e_squared(dp, q, form) < 0.0,
                                      e_squared(dp, hi, form) < 0.0};
  const bool straddles = !(inside[0] == inside[1] && inside[1] == inside[2]);
  if (!straddles) return (re_hi - re_lo) / (2.0 * step);
  // The derivative jumps at the exceptional point; report the requested one-sided slope.
  return side == Side::upper ? (re_hi - re_mid) / step : (re_mid - re_lo) / step;
}

RegimeReport classify_regime(const MaterialParams& m, double alpha) {
  m.validate();
  require_alpha(alpha);
  RegimeReport r;
  r.alpha = alpha;
  r.alpha_cri_plus = critical_alpha(m, Mode::plus);
  r.alpha_cri_minus = critical_alpha(m, Mode::minus);
  if (alpha <= r.alpha_cri_plus) {
    r.regime = Regime::gap_melting;
  } else if (alpha < r.alpha_cri_minus) {
    r.regime = Regime::oscillating;
  } else {
    r.regime = Regime::beating;
  }
  r.k_cri_plus = critical_wavenumber(m, Mode::plus, alpha);
  r.k_cri_minus = critical_wavenumber(m, Mode::minus, alpha);
  if (r.k_cri_plus) r.lambda_plus = std::numbers::pi / *r.k_cri_plus;
  if (r.k_cri_minus) r.lambda_minus = std::numbers::pi / *r.k_cri_minus;
  if (r.lambda_plus && r.lambda_minus) {
    const double diff = std::abs(1.0 / *r.lambda_plus - 1.0 / *r.lambda_minus);
    r.beat_period = diff > 0.0 ? 1.0 / diff : std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace magcas
