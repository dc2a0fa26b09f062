#include "magcas/casimir.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "magcas/compensated_sum.hpp"
#include "magcas/quadrature.hpp"

namespace magcas {

namespace {

std::string scientific(double value) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << value;
  return out.str();
}

using quad::Grade;
using quad::Node;

constexpr Real kPi = std::numbers::pi_v<Real>;
constexpr Real kBandTop = 8;     // max of s over the 2D zone
constexpr Real kSaddle = 4;      // log singularity of the density
constexpr int kInplaneLevels = 20;
constexpr int kCrossingLevels = 22;
constexpr int kMirrorLevels = 3;
constexpr Real kFarStrip = 4;   // strip half-width assumed for bands without a branch point

// Principal square root of a real number, as a complex value.
std::complex<Real> principal_sqrt(Real x) {
  return x >= 0 ? std::complex<Real>(std::sqrt(x), 0) : std::complex<Real>(0, std::sqrt(-x));
}

// Geometric levels needed to resolve a complex singularity at distance `distance`
// from the graded end of an interval of length `length`.
int levels_for(Real distance, Real length) {
  if (!(distance > 0)) return kCrossingLevels;
  const Real ratio = distance / length;
  if (ratio >= 1) return 1;
  const int levels = static_cast<int>(std::ceil(std::log(ratio) / std::log(Real{quad::kGradingRatio}))) + 2;
  return std::clamp(levels, 1, kCrossingLevels);
}

enum class Part { discrete, continuum, difference };

// Evaluates the per-s q_z averages of one band for one film thickness.
class FilmKernel {
 public:
  FilmKernel(const Band& band, int n_z, int inplane_order, int kz_order)
      : band_(band), n_z_(n_z), inplane_(inplane_order), kz_(kz_order), branch_(band.branch_invariant()) {
    out_of_plane_.resize(static_cast<std::size_t>(n_z) + 1);
    for (int n = 0; n <= n_z; ++n) {
      const Real sine = std::sin(kPi * n / (2 * n_z));
      out_of_plane_[n] = 4 * sine * sine;
    }
    out_of_plane_[n_z] = 4;
  }

  // Where g(s, 4 sin^2(q/2)) stops being analytic in q: a real crossing in (0, pi),
  // or a branch point at imaginary distance `distance` above q = 0 or q = pi.
  struct Singularity {
    enum Kind { none, crossing, above_zero, above_pi } kind = none;
    Real position = 0;
    Real distance = 0;
  };

  Singularity singularity(Real s) const {
    if (!branch_) return {};
    const Real w_star = *branch_ - s;
    if (w_star > 0 && w_star < 4) return {Singularity::crossing, 2 * std::asin(std::sqrt(w_star / 4)), 0};
    if (w_star <= 0) return {Singularity::above_zero, 0, 2 * std::asinh(std::sqrt(-w_star) / 2)};
    return {Singularity::above_pi, kPi, 2 * std::acosh(std::sqrt(w_star / 4))};
  }

  // (1 / 2N) sum_{n=1}^{2N} g(s, w_n); n and 2N - n share w_n.
  std::complex<Real> discrete_mean(Real s) const {
    BasicCompensatedComplexSum<Real> sum;
    sum += band_.dispersive(s, 0);
    sum += band_.dispersive(s, 4);
    for (int n = 1; n < n_z_; ++n) sum += Real{2} * band_.dispersive(s, out_of_plane_[n]);
    return sum.value() / Real(2 * n_z_);
  }

  // (1 / pi) int_0^pi g(s, 4 sin^2(q/2)) dq, split where g is not analytic.
  std::complex<Real> continuum_mean(Real s) const {
    std::vector<Node>& nodes = scratch_;
    nodes.clear();
    const Singularity at = singularity(s);
    switch (at.kind) {
      case Singularity::none:
        quad::append_graded(kz_, 0, kPi, Grade::none, 0, nodes);
        break;
      case Singularity::crossing:
        append_crossing(at.position, nodes);
        break;
      case Singularity::above_zero:
        quad::append_graded(kz_, 0, kPi, Grade::left, levels_for(at.distance, kPi), nodes);
        break;
      case Singularity::above_pi:
        quad::append_graded(kz_, 0, kPi, Grade::right, levels_for(at.distance, kPi), nodes);
        break;
    }
    BasicCompensatedComplexSum<Real> sum;
    for (const Node& node : nodes) {
      const Real sine = std::sin(node.x / 2);
      sum += node.w * band_.dispersive(s, 4 * sine * sine);
    }
    return sum.value() / kPi;
  }

  // Nodes on [0, pi] around a square-root onset at q*. With q = q* -+ u^2 the
  // integrand is analytic in u; what is left is the mirror zero at q = -q*, at
  // u = sqrt(2 q*) on the left and u = i sqrt(2 q*) on the right.
  void append_crossing(Real q_star, std::vector<Node>& nodes) const {
    std::vector<Node>& u_nodes = u_scratch_;
    u_nodes.clear();
    const Real left = std::sqrt(q_star);
    quad::append_graded(kz_, 0, left, Grade::right, kMirrorLevels, u_nodes);
    for (const Node& u : u_nodes) nodes.push_back(Node{q_star - u.x * u.x, 2 * u.x * u.w});

    u_nodes.clear();
    const Real right = std::sqrt(kPi - q_star);
    const Real mirror = std::sqrt(2 * q_star);
    quad::append_graded(kz_, 0, right, Grade::left, levels_for(mirror, right), u_nodes);
    for (const Node& u : u_nodes) nodes.push_back(Node{q_star + u.x * u.x, 2 * u.x * u.w});
  }

  // True when |discrete_mean(s) - continuum_mean(s)| is provably below the rounding
  // of either. For g analytic and bounded by M on |Im q| < d, the 2N-point periodic
  // trapezoid rule errs by at most 2M / (exp(2N d) - 1).
  bool difference_negligible(Real s) const {
    const Singularity at = singularity(s);
    if (at.kind == Singularity::crossing) return false;
    const Real strip = at.kind == Singularity::none ? kFarStrip : at.distance;
    const Real bound = band_.magnitude_bound(s, 2 + 2 * std::cosh(strip));
    if (!std::isfinite(bound)) return false;
    const Real alias = 2 * bound / std::expm1(2 * n_z_ * strip);
    return alias <= std::numeric_limits<Real>::epsilon() * std::abs(band_.dispersive(s, 2));
  }

  // Points where the integrand over s is not analytic: beta for the continuum
  // part, beta - w_n for the discrete one, and the density's saddle at 4.
  std::vector<Real> singular_points(Part part) const {
    std::vector<Real> points = {kSaddle};
    if (branch_) {
      const Real beta = *branch_;
      if (part == Part::continuum) {
        points.push_back(beta);
      } else {
        for (const Real w : out_of_plane_) points.push_back(beta - w);
        if (part == Part::difference) points.push_back(beta);
      }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
  }

  // Graded toward every singular point inside (0, 8). The band edges are regular,
  // but a singular point just below 0 still needs grading there by its distance.
  std::vector<Node> inplane_nodes(Part part) const {
    const std::vector<Real> singular = singular_points(part);
    std::vector<Real> points = {0};
    Real below_zero = -std::numeric_limits<Real>::infinity();
    for (const Real p : singular) {
      if (p <= 0) below_zero = p;
      if (p > 0 && p < kBandTop) points.push_back(p);
    }
    const std::size_t last_singular = points.size() - 1;
    points.push_back(kBandTop);
    const int levels_at_zero = std::isfinite(below_zero) ? levels_for(-below_zero, points[1]) : 0;

    std::vector<Node> nodes;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const int levels_a = i > 0 ? kInplaneLevels : levels_at_zero;
      const int levels_b = i + 1 <= last_singular ? kInplaneLevels : 0;
      const Real a = points[i];
      const Real b = points[i + 1];
      if (levels_a > 0 && levels_b > 0) {
        const Real mid = (a + b) / 2;
        quad::append_graded(inplane_, a, mid, Grade::left, levels_a, nodes);
        quad::append_graded(inplane_, mid, b, Grade::right, levels_b, nodes);
      } else if (levels_a > 0) {
        quad::append_graded(inplane_, a, b, Grade::left, levels_a, nodes);
      } else if (levels_b > 0) {
        quad::append_graded(inplane_, a, b, Grade::right, levels_b, nodes);
      } else {
        quad::append_graded(inplane_, a, b, Grade::none, 0, nodes);
      }
    }
    return nodes;
  }

 private:
  const Band& band_;
  int n_z_;
  quad::GaussLegendre inplane_;
  quad::GaussLegendre kz_;
  std::optional<Real> branch_;
  std::vector<Real> out_of_plane_;
  mutable std::vector<Node> scratch_;
  mutable std::vector<Node> u_scratch_;
};

struct Evaluation {
  std::complex<Real> value;
  Real scale = 0;  // magnitude of the dispersive zero-point sum, for the rounding floor
};

// Density-weighted in-plane integral of the requested per-s quantity.
Evaluation integrate(const Band& band, int n_z, int inplane_order, int kz_order, Part part) {
  const FilmKernel kernel(band, n_z, inplane_order, kz_order);
  BasicCompensatedComplexSum<Real> total;
  BasicCompensatedSum<Real> scale;
  for (const Node& node : kernel.inplane_nodes(part)) {
    const Real weight = node.w * quad::square_lattice_density(static_cast<double>(node.x));
    if (weight == 0) continue;
    std::complex<Real> value;
    switch (part) {
      case Part::discrete: {
        value = kernel.discrete_mean(node.x);
        scale += weight * std::abs(value);
        break;
      }
      case Part::continuum: {
        value = kernel.continuum_mean(node.x);
        scale += weight * std::abs(value);
        break;
      }
      case Part::difference: {
        if (kernel.difference_negligible(node.x)) {
          scale += weight * std::abs(band.dispersive(node.x, 2));
          continue;
        }
        const std::complex<Real> discrete = kernel.discrete_mean(node.x);
        value = discrete - kernel.continuum_mean(node.x);
        scale += weight * std::abs(discrete);
        break;
      }
    }
    total += weight * value;
  }
  return Evaluation{total.value(), scale.value()};
}

Evaluation converged(const Band& band, int n_z, const QuadratureSpec& q, Part part, const char* what) {
  const Evaluation base = integrate(band, n_z, q.inplane_points, q.kz_points, part);
  if (!q.check_convergence) return base;
  const Evaluation refined =
      integrate(band, n_z, q.inplane_points * q.refine_factor, q.kz_points * q.refine_factor, part);
  const Real change = std::abs(refined.value - base.value);
  const Real floor = 16 * std::numeric_limits<Real>::epsilon() * refined.scale;
  if (!(change <= q.tol_rel * std::abs(refined.value) + floor)) {
    throw QuadratureFailure(std::string(what) + ": refinement changed the result by " +
                                scientific(static_cast<double>(change)) + " (relative tolerance " +
                                scientific(q.tol_rel) + ")",
                            static_cast<double>(std::abs(base.value)), static_cast<double>(std::abs(refined.value)));
  }
  return refined;
}

std::complex<double> to_double(std::complex<Real> z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <typename PerBand>
std::complex<double> sum_modes(const MaterialParams& m, double alpha, PerBand per_band) {
  std::complex<double> total;
  for (const Mode mode : kModes) total += per_band(MagnonBand(m, mode, alpha));
  return total;
}

}  // namespace

void FilmGeometry::validate() const {
  if (n_z < 1) throw ValidationError("n_z must be >= 1");
}

void QuadratureSpec::validate() const {
  if (inplane_points < 16) throw ValidationError("inplane_points must be >= 16");
  if (kz_points < 16) throw ValidationError("kz_points must be >= 16");
  if (refine_factor < 2) throw ValidationError("refine_factor must be >= 2");
  if (!(tol_rel > 0.0) || !std::isfinite(tol_rel)) throw ValidationError("tol_rel must be > 0");
}

MagnonBand::MagnonBand(const MaterialParams& m, Mode mode, double alpha)
    : params_(derive_params(m, mode, alpha)) {
  const Real alpha_r = alpha;
  prefactor_ = 2 * Real{m.S} / (1 + alpha_r * alpha_r);
  a_squared_ = Real{params_.A} * params_.A;
  const Real damped = Real{params_.D} * alpha_r;
  const Real gap_squared = (params_.delta - damped) * (params_.delta + damped);
  offset_ = std::complex<double>(0.0, -2.0 * m.S / (1.0 + alpha * alpha) * alpha * params_.C);
  branch_ = -gap_squared / a_squared_;
}

Real MagnonBand::magnitude_bound(Real inplane, Real radius) const {
  return prefactor_ * std::sqrt(a_squared_ * (std::abs(inplane - branch_) + radius));
}

std::complex<Real> MagnonBand::dispersive(Real inplane, Real out_of_plane) const {
  // A^2 (s + w - beta), with beta = -gap^2 / A^2; grouped so the sign is exact near the root.
  const Real e2 = a_squared_ * ((inplane - branch_) + out_of_plane);
  return prefactor_ * principal_sqrt(e2);
}

std::complex<double> zero_point_sum(const Band& band, FilmGeometry geom, const QuadratureSpec& quad) {
  geom.validate();
  quad.validate();
  const Evaluation e = converged(band, geom.n_z, quad, Part::discrete, "zero_point_sum");
  return 0.5 * geom.n_z * (to_double(e.value) + band.offset());
}

std::complex<double> zero_point_integral(const Band& band, FilmGeometry geom, const QuadratureSpec& quad) {
  geom.validate();
  quad.validate();
  // The continuum part does not depend on n_z: compute its density once, then scale.
  const Evaluation e = converged(band, 1, quad, Part::continuum, "zero_point_integral");
  const std::complex<double> density = 0.5 * (to_double(e.value) + band.offset());
  return static_cast<double>(geom.n_z) * density;
}

std::complex<double> casimir_energy(const Band& band, FilmGeometry geom, const QuadratureSpec& quad) {
  geom.validate();
  quad.validate();
  const Evaluation e = converged(band, geom.n_z, quad, Part::difference, "casimir_energy");
  return to_double(Real(geom.n_z) / 2 * e.value);
}

std::complex<double> zero_point_sum(const MaterialParams& m, double alpha, FilmGeometry geom,
                                    const QuadratureSpec& quad) {
  return sum_modes(m, alpha, [&](const Band& band) { return zero_point_sum(band, geom, quad); });
}

std::complex<double> zero_point_integral(const MaterialParams& m, double alpha, FilmGeometry geom,
                                         const QuadratureSpec& quad) {
  return sum_modes(m, alpha, [&](const Band& band) { return zero_point_integral(band, geom, quad); });
}

std::complex<double> casimir_energy(const MaterialParams& m, double alpha, FilmGeometry geom,
                                    const QuadratureSpec& quad) {
  return sum_modes(m, alpha, [&](const Band& band) { return casimir_energy(band, geom, quad); });
}

std::complex<double> casimir_coefficient(std::complex<double> e_cas, int n_z, double b) {
  if (n_z < 1) throw ValidationError("n_z must be >= 1");
  return e_cas * std::pow(static_cast<double>(n_z), b);
}

double default_exponent(const MaterialParams& m, double alpha) {
  return classify_regime(m, alpha).regime == Regime::gap_melting ? 3.0 : 1.5;
}

std::vector<CasimirPoint> thickness_sweep(const MaterialParams& m, double alpha, int n_min, int n_max,
                                          double b, const QuadratureSpec& quad, int workers) {
  m.validate();
  quad.validate();
  if (n_min < 1 || n_max < n_min) throw ValidationError("sweep range must satisfy 1 <= n_z_min <= n_z_max");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (!std::isfinite(b)) throw ValidationError("b must be finite");
  // Validates alpha.
  (void)derive_params(m, Mode::plus, alpha);

  const std::size_t count = static_cast<std::size_t>(n_max - n_min) + 1;
  std::vector<CasimirPoint> points(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      const int n_z = n_min + static_cast<int>(i);
      try {
        const std::complex<double> e = casimir_energy(m, alpha, FilmGeometry{n_z}, quad);
        points[i] = CasimirPoint{n_z, e, casimir_coefficient(e, n_z, b), b};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    const int n_z = n_min + static_cast<int>(i);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const QuadratureFailure& failure) {
      throw QuadratureFailure("n_z=" + std::to_string(n_z) + ": " + failure.what(), failure.base(),
                              failure.refined(), n_z);
    }
  }
  return points;
}

}  // namespace magcas
