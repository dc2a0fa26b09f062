#include "magcas/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace magcas::quad {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, Real x, Real& value, Real& derivative) {
  Real p0 = 1;
  Real p1 = x;
  for (int k = 2; k <= n; ++k) {
    const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  value = n == 0 ? 1 : p1;
  derivative = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
  const int n = order;
  nodes_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton.
    Real x = std::cos(std::numbers::pi_v<Real> * (i + 0.75L) / (n + 0.5L));
    Real p = 0;
    Real dp = 1;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, x, p, dp);
      const Real dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    legendre(n, x, p, dp);
    const Real w = 2 / ((1 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0;
}

void GaussLegendre::append(Real a, Real b, std::vector<Node>& out) const {
  const Real half = (b - a) / 2;
  const Real mid = (a + b) / 2;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out.push_back(Node{mid + half * nodes_[i], half * weights_[i]});
  }
}

namespace {

// Panels on [a, b] shrinking toward `a` (toward_left) or `b`.
void append_one_sided(const GaussLegendre& rule, Real a, Real b, bool toward_left, int levels,
                      std::vector<Node>& out) {
  const Real length = b - a;
  Real inner = 0;
  for (int k = levels; k >= 0; --k) {
    const Real outer = k == 0 ? 1 : std::pow(Real{kGradingRatio}, k);
    if (toward_left) {
      rule.append(a + length * inner, a + length * outer, out);
    } else {
      rule.append(b - length * outer, b - length * inner, out);
    }
    inner = outer;
  }
}

}  // namespace

void append_graded(const GaussLegendre& rule, Real a, Real b, Grade grade, int levels,
                   std::vector<Node>& out) {
  if (!(b > a)) return;
  switch (grade) {
    case Grade::none:
      rule.append(a, b, out);
      return;
    case Grade::left:
      append_one_sided(rule, a, b, true, levels, out);
      return;
    case Grade::right:
      append_one_sided(rule, a, b, false, levels, out);
      return;
    case Grade::both: {
      const Real mid = (a + b) / 2;
      append_one_sided(rule, a, mid, true, levels, out);
      append_one_sided(rule, mid, b, false, levels, out);
      return;
    }
  }
}

double elliptic_k_from_complement(double k_complement) {
  if (k_complement <= 0.0) return std::numeric_limits<double>::infinity();
  double a = 1.0;
  double g = k_complement;
  for (int i = 0; i < 64 && std::abs(a - g) > 1e-16 * a; ++i) {
    const double next = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = next;
  }
  return std::numbers::pi / (a + g);
}

double square_lattice_density(double s) {
  if (s <= 0.0 || s >= 8.0) return 0.0;
  // With eps = s - 4 = -2(cos q_x + cos q_y): rho = K(k) / (2 pi^2), k' = |eps| / 4.
  const double k_complement = std::abs(s - 4.0) / 4.0;
  return elliptic_k_from_complement(k_complement) / (2.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace magcas::quad
