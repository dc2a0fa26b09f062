#pragma once

// Quadrature building blocks for the Brillouin-zone integrals.

#include <span>
#include <vector>

#include "magcas/core.hpp"

namespace magcas::quad {

struct Node {
  Real x = 0;
  Real w = 0;
};

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const Real> nodes() const { return nodes_; }
  std::span<const Real> weights() const { return weights_; }

  /// Appends the rule mapped onto [a, b].
  void append(Real a, Real b, std::vector<Node>& out) const;

 private:
  std::vector<Real> nodes_;
  std::vector<Real> weights_;
};

/// Which interval ends the panels cluster toward.
enum class Grade { none, left, right, both };

/// Panel ratio of the geometric mesh.
inline constexpr double kGradingRatio = 0.25;

/// Composite Gauss rule on [a, b] with geometrically shrinking panels toward the
/// graded end(s): breakpoints at r^levels, ..., r, 1 of the (half-)interval.
/// With `both`, each half of the interval is graded toward its own end.
void append_graded(const GaussLegendre& rule, Real a, Real b, Grade grade, int levels,
                   std::vector<Node>& out);

/// Complete elliptic integral of the first kind K(k), taking the complementary
/// modulus k' = sqrt(1 - k^2) so that k -> 1 keeps full precision. AGM-based.
double elliptic_k_from_complement(double k_complement);

/// Density of s = 4 sin^2(q_x/2) + 4 sin^2(q_y/2) over the square Brillouin zone with
/// measure d^2q / (2 pi)^2. Supported on [0, 8], integrates to 1, log-singular at s = 4.
double square_lattice_density(double s);

}  // namespace magcas::quad
