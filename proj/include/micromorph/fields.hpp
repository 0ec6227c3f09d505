#pragma once

// Closed-form field configurations and their derivatives.
//
// Convention used project-wide: derivative slots are appended LAST. The
// gradient of u_a is grad_u(a, i) = u_{a,i}; divergences contract the last
// slot, D_i T_{...i}.

#include <array>
#include <functional>
#include <variant>

#include "micromorph/dual.hpp"
#include "micromorph/expression.hpp"
#include "micromorph/tensor.hpp"

namespace micromorph {

struct Box {
  Point lo{};
  Point hi{};
};

struct Ball {
  Point center{};
  double radius = 1.0;
};

using Region = std::variant<Box, Ball>;

bool contains(const Region& region, const Point& x, double slack = 1e-12);

/// True iff `inner` lies inside `outer` (closed containment).
bool region_inside(const Region& inner, const Region& outer);

/// Value of a field quantity plus its first and second x-derivatives.
struct Jet {
  Tensor value;
  Tensor gradient;  // one extra trailing slot
  Tensor hessian;   // two extra trailing slots, symmetric in them
};

struct JetBundle {
  Jet u;       // displacement u_a
  Jet phi;     // micro-distortion phi_ab
  Jet force;   // body force F_a
  Jet couple;  // body couple L_ab
};

class FieldSet {
 public:
  using Vector = std::array<Expression, 3>;
  using Matrix = std::array<Expression, 9>;  // row-major

  FieldSet(Vector u, Matrix phi, Vector force, Matrix couple, Region domain);

  const Vector& u() const noexcept { return u_; }
  const Matrix& phi() const noexcept { return phi_; }
  const Vector& force() const noexcept { return force_; }
  const Matrix& couple() const noexcept { return couple_; }
  const Region& domain() const noexcept { return domain_; }

  /// Throws DomainError outside the domain.
  JetBundle evaluate_jet(const Point& x) const;

  /// As evaluate_jet but without the domain check; used by finite-difference
  /// stencils that may step just outside the boundary.
  JetBundle evaluate_jet_unchecked(const Point& x) const;

 private:
  Vector u_;
  Matrix phi_;
  Vector force_;
  Matrix couple_;
  Region domain_;
  Program program_;
};

inline JetBundle evaluate_jet(const FieldSet& fs, const Point& x) { return fs.evaluate_jet(x); }

/// Pointwise arguments of the energy: x, u, phi, their gradients, and the
/// prescribed sources.
template <class S>
struct FieldArgs {
  std::array<S, kDim> x{};
  BasicTensor<S> u{1};
  BasicTensor<S> phi{2};
  BasicTensor<S> grad_u{2};
  BasicTensor<S> grad_phi{3};
  BasicTensor<S> force{1};
  BasicTensor<S> couple{2};
};

FieldArgs<double> field_args(const JetBundle& jets, const Point& x);

/// Arguments whose derivative slots hold d/dx_i along the configuration,
/// seeded from the exact jets. Evaluating any function of these yields its
/// total derivative D_i.
FieldArgs<Dual3> seeded_field_args(const JetBundle& jets, const Point& x);

/// D_i g for all three i, derivative slot last. `g` maps FieldArgs<Dual3> to
/// a BasicTensor<Dual3> (or a Dual3 scalar, giving a rank-1 result).
template <class G>
Tensor total_derivative(G&& g, const FieldSet& fs, const Point& x) {
  const FieldArgs<Dual3> args = seeded_field_args(fs.evaluate_jet(x), x);
  auto r = g(args);
  if constexpr (std::is_same_v<std::decay_t<decltype(r)>, Dual3>) {
    Tensor out(1);
    for (int i = 0; i < kDim; ++i) out[i] = r.v[i];
    return out;
  } else {
    Tensor out(r.rank() + 1);
    for (std::size_t k = 0; k < r.size(); ++k) {
      for (int i = 0; i < kDim; ++i) out[k * kDim + i] = r[k].v[i];
    }
    return out;
  }
}

using OpaqueFunction = std::function<Tensor(const FieldArgs<double>&)>;

/// Central-difference fallback for functions that cannot be evaluated on dual
/// numbers. Throws NumericError if x_i +- h rounds back to x_i.
Tensor total_derivative_fd(const OpaqueFunction& g, const FieldSet& fs, const Point& x, double h = 1e-5);

using PointFunction = std::function<Tensor(const Point&)>;

/// sum_i [T(x + h e_i) - T(x - h e_i)]_{...i} / (2h).
Tensor fd_divergence(const PointFunction& field, const Point& x, double h = 1e-5);

}  // namespace micromorph
