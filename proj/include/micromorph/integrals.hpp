#pragma once

// Quadrature over boxes and balls and the J, L, M integrals.
//
// Box faces and volumes use tensor-product Gauss-Legendre rules. The sphere
// uses Gauss-Legendre in cos(theta) with `order` nodes and the trapezoid rule
// in the azimuth with 2*order nodes, so both directions integrate
// polynomials of degree 2*order-1 exactly. The ball adds a radial Gauss
// factor for the weight r^2 (Gauss-Jacobi), exact for the same degree.

#include <functional>
#include <string>
#include <vector>

#include "micromorph/currents.hpp"
#include "micromorph/fields.hpp"

namespace micromorph {

struct QuadratureRule {
  Region geometry = Ball{};
  int surface_order = 8;
  int volume_order = 8;
};

struct QuadraturePoint {
  Point x{};
  Point normal{};  // outward unit normal; zero for volume points
  double weight = 0.0;
};

/// Nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Nodes on [0, 1] and weights with sum_k w_k p(r_k) = int_0^1 r^2 p(r) dr
/// for polynomials p of degree <= 2n-1.
void gauss_radial(int n, std::vector<double>& nodes, std::vector<double>& weights);

std::vector<QuadraturePoint> surface_points(const QuadratureRule& rule);
std::vector<QuadraturePoint> volume_points(const QuadratureRule& rule);

/// Number of worker threads used for point evaluations; 0 picks the hardware
/// concurrency. Reductions always run serially in point order, so results do
/// not depend on this setting.
void set_evaluation_threads(int threads);
int evaluation_threads();

/// Calls fn(k) for k in [0, n) on evaluation_threads() workers. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Closed-surface integral of flux_{...i} n_i. Throws DomainError when a
/// domain is given and the geometry does not lie inside it.
Tensor surface_integral(const PointFunction& flux, const QuadratureRule& rule, const Region* domain = nullptr);

Tensor volume_integral(const PointFunction& density, const QuadratureRule& rule, const Region* domain = nullptr);

/// Surface and volume evaluations of one integral and their discrepancy
/// |surface - volume|_max / max(1, |surface|_max, |volume|_max).
struct IntegralPair {
  Tensor surface;
  Tensor volume;
  double discrepancy = 0.0;
};

IntegralPair make_pair_report(Tensor surface, Tensor volume);

/// J_k = surface of P_ki n_i, volume of -f_k.
IntegralPair j_integral(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                        const EvalOptions& opts = {});

/// L_k = surface of M_ki n_i, volume of the rotational source.
IntegralPair l_integral(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                        const EvalOptions& opts = {});

/// M = surface of Y_i n_i, volume of the scaling source.
IntegralPair m_integral(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                        const ScalingDims& dims, const EvalOptions& opts = {});

struct IntegralReport {
  IntegralPair J;
  IntegralPair L;
  IntegralPair M;
  /// -volume integral of kappa:m, the part of M that survives without sources.
  double kappa_m_volume = 0.0;
  int surface_order = 0;
  int volume_order = 0;
  std::size_t surface_point_count = 0;
  std::size_t volume_point_count = 0;
  std::string geometry;
};

/// All three integrals in one pass over the surface and volume points.
IntegralReport compute_integrals(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                                 const ScalingDims& dims, const EvalOptions& opts = {});

std::string describe(const Region& region);

}  // namespace micromorph
