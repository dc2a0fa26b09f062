#pragma once

// Lattice-regularized magnonic Casimir energy of a film of N_z unit cells.
//
// The film quantizes q_z = pi n / N_z (n = 1..2 N_z). E_Cas is the zero-point energy
// with that discrete q_z minus the one with continuous q_z, per surface unit cell.
//
// Every band handled here depends on the wavevector only through the lattice
// invariants s = 4 sin^2(q_x/2) + 4 sin^2(q_y/2) and w = 4 sin^2(q_z/2). The in-plane
// Brillouin-zone integral therefore collapses to a 1D integral over s weighted by
// the square-lattice density (see quadrature.hpp), and the q_z integral over
// [0, 2 pi] folds onto [0, pi].

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "magcas/core.hpp"

namespace magcas {

struct FilmGeometry {
  int n_z = 1;  ///< unit cells across the film (L_z = a n_z)

  void validate() const;
};

/// Quadrature controls. Both rules are composite Gauss-Legendre on geometrically
/// graded panels; the counts below are nodes per panel.
struct QuadratureSpec {
  int inplane_points = 20;
  int kz_points = 24;
  int refine_factor = 2;   ///< order multiplier for the convergence re-run
  double tol_rel = 1e-8;   ///< allowed relative change under refinement
  bool check_convergence = true;

  void validate() const;
};

/// The refined evaluation disagreed with the base one by more than tol_rel.
class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& what, double base, double refined, std::optional<int> n_z = {})
      : std::runtime_error(what), base_(base), refined_(refined), n_z_(n_z) {}

  double base() const { return base_; }
  double refined() const { return refined_; }
  /// Offending thickness when raised from a sweep.
  std::optional<int> n_z() const { return n_z_; }

 private:
  double base_;
  double refined_;
  std::optional<int> n_z_;
};

/// One energy band on the lattice: eps = offset() + dispersive(s, w).
/// dispersive() is evaluated in extended precision; rounding it to double before
/// the sums would put noise of order N_z * eps * |eps| into E_Cas.
class Band {
 public:
  virtual ~Band() = default;

  /// Wavevector-independent part; cancels exactly from E_Cas.
  virtual std::complex<double> offset() const { return {}; }

  virtual std::complex<Real> dispersive(Real inplane, Real out_of_plane) const = 0;

  /// Value of s + w at which dispersive() stops being analytic, if any.
  virtual std::optional<Real> branch_invariant() const { return std::nullopt; }

  /// Upper bound on |dispersive(s, w)| over complex |w| <= radius. Together with
  /// branch_invariant() it bounds the sum-minus-integral error per s, which lets
  /// the quadrature skip s where that error is below rounding. Infinity disables it.
  virtual Real magnitude_bound(Real /*inplane*/, Real /*radius*/) const {
    return std::numeric_limits<Real>::infinity();
  }
};

/// Magnon mode sigma at damping alpha, lattice-regularized.
class MagnonBand final : public Band {
 public:
  MagnonBand(const MaterialParams& m, Mode mode, double alpha);

  std::complex<double> offset() const override { return offset_; }
  std::complex<Real> dispersive(Real inplane, Real out_of_plane) const override;
  std::optional<Real> branch_invariant() const override { return branch_; }
  Real magnitude_bound(Real inplane, Real radius) const override;

  const DerivedParams& params() const { return params_; }

 private:
  DerivedParams params_;
  Real prefactor_ = 0;
  Real a_squared_ = 0;
  std::complex<double> offset_;
  Real branch_ = 0;
};

/// Sum over sigma of the BZ-averaged (1/2)(1/2 sum_{n=1}^{2N_z} eps_n).
std::complex<double> zero_point_sum(const MaterialParams& m, double alpha, FilmGeometry geom,
                                    const QuadratureSpec& quad);
std::complex<double> zero_point_sum(const Band& band, FilmGeometry geom, const QuadratureSpec& quad);

/// Sum over sigma of the BZ-averaged (1/2) N_z int_0^{2pi} dq_z/(2pi) eps. Linear in N_z.
std::complex<double> zero_point_integral(const MaterialParams& m, double alpha, FilmGeometry geom,
                                         const QuadratureSpec& quad);
std::complex<double> zero_point_integral(const Band& band, FilmGeometry geom, const QuadratureSpec& quad);

/// E_Cas = E0_sum - E0_int, with the difference formed before the in-plane integral.
std::complex<double> casimir_energy(const MaterialParams& m, double alpha, FilmGeometry geom,
                                    const QuadratureSpec& quad);
std::complex<double> casimir_energy(const Band& band, FilmGeometry geom, const QuadratureSpec& quad);

/// E_Cas * n_z^b.
std::complex<double> casimir_coefficient(std::complex<double> e_cas, int n_z, double b);

struct CasimirPoint {
  int n_z = 0;
  std::complex<double> e_cas;
  std::complex<double> coeff;
  double b = 0.0;
};

/// Exponent used for the coefficient when none is given: 3 below the first
/// critical damping, 1.5 once an exceptional point exists.
double default_exponent(const MaterialParams& m, double alpha);

/// One point per n_z in [n_min, n_max], ascending. Output is bit-identical for
/// any worker count. A QuadratureFailure is re-raised tagged with its n_z.
std::vector<CasimirPoint> thickness_sweep(const MaterialParams& m, double alpha, int n_min, int n_max,
                                          double b, const QuadratureSpec& quad, int workers = 1);

}  // namespace magcas
