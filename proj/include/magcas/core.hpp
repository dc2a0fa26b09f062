#pragma once

// Dissipative magnon dispersion of a two-sublattice antiferromagnet.
//
// Energies are in meV, lengths in nm, and wavenumbers are reduced (q = a k).
// Every function here is pure; the types are plain values.

#include <optional>
#include <stdexcept>
#include <string>

namespace magcas {

/// Working precision of the film quadrature, where E_Cas is a small difference of
/// large sums.
using Real = long double;

/// Raised when an input violates a documented invariant. `what()` names it.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Material constants of the magnet.
struct MaterialParams {
  double J = 0.0;   ///< exchange, meV (> 0)
  double K_e = 0.0; ///< easy-axis anisotropy, meV (> 0)
  double K_h = 0.0; ///< hard-axis anisotropy, meV (>= 0; 0 is the uniaxial case)
  double S = 0.0;   ///< spin per magnetic unit cell (> 0)
  double a = 0.0;   ///< magnetic unit cell length, nm (> 0)

  /// Throws ValidationError naming the first violated constraint.
  void validate() const;
};

/// Preset with the NiO estimates (J=47.1, K_h=0.0395, K_e=0.00172 meV, S=1.21, a=0.417 nm).
MaterialParams nio();

/// Magnon branch. `plus` is acoustic, `minus` optical.
enum class Mode { plus, minus };

inline constexpr Mode kModes[] = {Mode::plus, Mode::minus};

/// +1 for plus, -1 for minus.
constexpr double sign_of(Mode mode) { return mode == Mode::plus ? 1.0 : -1.0; }

const char* to_string(Mode mode);

/// Per-mode dispersion constants. `alpha` and `mode` record what they were built for.
struct DerivedParams {
  double A = 0.0;
  double delta = 0.0;
  double D = 0.0;
  double C = 0.0;
  Mode mode = Mode::plus;
  double alpha = 0.0;

  /// delta^2 - D^2 alpha^2, evaluated without cancellation near the critical damping.
  double gap_squared() const;
};

/// Rejects alpha < 0 (or non-finite) and invalid material parameters.
DerivedParams derive_params(const MaterialParams& m, Mode mode, double alpha);

/// Reduced wavevector (a k_x, a k_y, a k_z).
struct ReducedWavevector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Long-wavelength (q^2) or lattice-regularized (2 - 2 cos q per axis) kinetic term.
enum class Form { continuum, lattice };

/// Which square root of E^2 < 0 to take. The Casimir engine always uses `principal`.
enum class Branch { principal, conjugate };

/// Complex magnon energy in meV.
struct ComplexEnergy {
  double re = 0.0;
  double im = 0.0;
};

/// Kinetic invariant: |q|^2 (continuum) or sum_j 4 sin^2(q_j / 2) (lattice).
double kinetic_term(const ReducedWavevector& q, Form form);

/// E^2 = A^2 * kinetic + delta^2 - D^2 alpha^2. Real; negative inside the exceptional-point region.
double e_squared(const DerivedParams& dp, const ReducedWavevector& q, Form form);

/// eps = 2S / (1 + alpha^2) * (-i alpha C + sqrt(E^2)).
ComplexEnergy dispersion(const DerivedParams& dp, const MaterialParams& m, const ReducedWavevector& q,
                         Form form, Branch branch = Branch::principal);

/// Delta = 2S / (1 + alpha^2) * Re sqrt(delta^2 - D^2 alpha^2); zero at and above the critical damping.
double energy_gap(const DerivedParams& dp, const MaterialParams& m);

/// alpha_cri = delta / D, the damping at which the gap closes.
double critical_alpha(const MaterialParams& m, Mode mode);

/// Reduced exceptional-point radius a k_cri, or nullopt when alpha <= alpha_cri.
std::optional<double> critical_wavenumber(const MaterialParams& m, Mode mode, double alpha);

enum class Axis { x, y, z };

/// Side used when the finite-difference stencil straddles the exceptional point.
enum class Side { lower, upper };

/// Re d(eps)/d(a k) along `axis` by central differences; one-sided (on `side`) when
/// E^2 changes sign inside the stencil. Throws ValidationError for step <= 0.
double group_velocity(const DerivedParams& dp, const MaterialParams& m, const ReducedWavevector& q,
                      Axis axis, double step, Side side = Side::upper, Form form = Form::continuum);

enum class Regime { gap_melting, oscillating, beating };

const char* to_string(Regime regime);

struct RegimeReport {
  Regime regime = Regime::gap_melting;
  double alpha = 0.0;
  double alpha_cri_plus = 0.0;
  double alpha_cri_minus = 0.0;
  std::optional<double> k_cri_plus;
  std::optional<double> k_cri_minus;
  std::optional<double> lambda_plus;  ///< pi / (a k_cri_+), unit cells
  std::optional<double> lambda_minus; ///< pi / (a k_cri_-), unit cells
  /// 1 / |1/lambda_+ - 1/lambda_-|; +inf when both periods coincide (K_h = 0).
  std::optional<double> beat_period;
};

RegimeReport classify_regime(const MaterialParams& m, double alpha);

}  // namespace magcas
