#pragma once

// Configurational currents and their balance laws.
//
//   P_ki = W d_ki - u_{a,k} t_ai - phi_{ab,k} m_abi                        (Eshelby stress)
//   M_ki = e_kjn (x_j P_ni + u_j t_ni + phi_lj m_lni + phi_jl m_nli)       (angular momentum)
//   Y_i  = x_j P_ji + d_u u_j t_ji + d_phi phi_jl m_jli                     (scaling flux)
//
//   D_i P_ki = -f_k
//   D_i M_ki = e_kjn (g_ij t_in + g_ji t_ni + 2 e_ij s_in
//                     + k_ijl m_inl + k_jli m_nli + k_lij m_lin)
//              - e_kjn (x_j f_n + u_j F_n + phi_ji L_ni + phi_ij L_in)
//   D_i Y_i  = -k:m - x.f - (n+2)/2 u.F - n/2 phi:L
//
// with f the inhomogeneity force -dW/dx at frozen fields.

#include <functional>
#include <vector>

#include "micromorph/kinetics.hpp"

namespace micromorph {

struct ScalingDims {
  double d_u = -0.5;
  double d_phi = -1.5;
  int n = 3;

  /// d_u = -(n-2)/2, d_phi = -n/2.
  static ScalingDims for_dimension(int n);
};

template <class S>
BasicTensor<S> eshelby_stress(const PointState<S>& ps) {
  const auto& gu = ps.args.grad_u;
  const auto& gp = ps.args.grad_phi;
  const auto& t = ps.stress.t;
  const auto& m = ps.stress.m;
  BasicTensor<S> P(2);
  for (int k = 0; k < kDim; ++k) {
    for (int i = 0; i < kDim; ++i) {
      S v = k == i ? ps.energy : S(0.0);
      for (int a = 0; a < kDim; ++a) {
        v -= gu(a, k) * t(a, i);
        for (int b = 0; b < kDim; ++b) v -= gp(a, b, k) * m(a, b, i);
      }
      P(k, i) = v;
    }
  }
  return P;
}

template <class S>
struct AngularMomentum {
  BasicTensor<S> total{2};
  BasicTensor<S> orbital{2};
  BasicTensor<S> spin{2};
};

namespace detail {
// (j, n, sign) with e_kjn = sign != 0, per k.
inline constexpr int kLevi[3][2][3] = {{{1, 2, 1}, {2, 1, -1}}, {{2, 0, 1}, {0, 2, -1}}, {{0, 1, 1}, {1, 0, -1}}};
}  // namespace detail

template <class S>
AngularMomentum<S> angular_momentum(const PointState<S>& ps) {
  const BasicTensor<S> P = eshelby_stress(ps);
  const auto& x = ps.args.x;
  const auto& u = ps.args.u;
  const auto& phi = ps.args.phi;
  const auto& t = ps.stress.t;
  const auto& m = ps.stress.m;
  AngularMomentum<S> out;
  for (int k = 0; k < kDim; ++k) {
    for (int i = 0; i < kDim; ++i) {
      S orb(0.0), spin(0.0);
      for (const auto& jn : detail::kLevi[k]) {
        const int j = jn[0];
        const int n = jn[1];
        const double sign = jn[2];
        orb += sign * x[j] * P(n, i);
        S sp = u[j] * t(n, i);
        for (int l = 0; l < kDim; ++l) sp += phi(l, j) * m(l, n, i) + phi(j, l) * m(n, l, i);
        spin += sign * sp;
      }
      out.orbital(k, i) = orb;
      out.spin(k, i) = spin;
      out.total(k, i) = orb + spin;
    }
  }
  return out;
}

template <class S>
BasicTensor<S> scaling_flux(const PointState<S>& ps, const ScalingDims& dims) {
  const BasicTensor<S> P = eshelby_stress(ps);
  const auto& x = ps.args.x;
  const auto& u = ps.args.u;
  const auto& phi = ps.args.phi;
  const auto& t = ps.stress.t;
  const auto& m = ps.stress.m;
  BasicTensor<S> Y(1);
  for (int i = 0; i < kDim; ++i) {
    S v(0.0);
    for (int j = 0; j < kDim; ++j) {
      v += x[j] * P(j, i) + dims.d_u * u[j] * t(j, i);
      for (int l = 0; l < kDim; ++l) v += dims.d_phi * phi(j, l) * m(j, l, i);
    }
    Y[i] = v;
  }
  return Y;
}

/// dW/du_{a,i} (rank 2) and dW/dphi_{ab,i} (rank 3), obtained by forward-mode
/// differentiation of the energy with respect to the field gradients; no
/// stress formula is used.
struct EnergyPartials {
  Tensor d_grad_u{2};
  Tensor d_grad_phi{3};
};

EnergyPartials energy_partials(const PointState<double>& ps, const EvalOptions& opts = {});

/// The same currents written with canonical partials instead of stresses.
Tensor eshelby_stress_canonical(const PointState<double>& ps, const EnergyPartials& d);
Tensor angular_momentum_canonical(const PointState<double>& ps, const EnergyPartials& d);
Tensor scaling_flux_canonical(const PointState<double>& ps, const EnergyPartials& d, const ScalingDims& dims);

/// First-order generators of a symmetry group with `components` parameters:
/// x' = x + eps X, u' = u + eps U, phi' = phi + eps Phi.
struct GeneratorTriple {
  int components = 1;
  std::function<Tensor(int, const FieldArgs<double>&)> X;    // rank 1
  std::function<Tensor(int, const FieldArgs<double>&)> U;    // rank 1
  std::function<Tensor(int, const FieldArgs<double>&)> Phi;  // rank 2

  static GeneratorTriple translation();
  static GeneratorTriple rotation();
  static GeneratorTriple scaling(const ScalingDims& dims);
};

/// A_i = U_a t_ai + Phi_ab m_abi + X_i W - X_j (u_{a,j} t_ai + phi_{ab,j} m_abi),
/// one rank-1 flux per generator component.
std::vector<Tensor> general_flux(const GeneratorTriple& g, const PointState<double>& ps);

/// f_k = -dW/dx_k at frozen field arguments.
Tensor inhomogeneity_force(const PointSample& sample);

/// First bracket of the angular momentum balance; vanishes for isotropic media.
Tensor isotropy_bracket(const PointState<double>& ps);

/// Full right-hand side of the angular momentum balance.
Tensor rotational_source(const PointSample& sample);

double scaling_source(const PointSample& sample, const ScalingDims& dims);

struct BalanceResiduals {
  Tensor momentum{1};  // D_i P_ki + f_k
  Tensor angular{1};   // D_i M_ki - rotational source
  double scaling = 0.0;  // D_i Y_i - scaling source
  /// Set when the point is not an Euler-Lagrange solution (residual > 1e-8);
  /// the balance laws then need not hold.
  bool not_a_solution = false;
  double el_residual = 0.0;

  double max_norm() const;
};

/// Divergences via exact total derivatives.
BalanceResiduals balance_residuals(const FieldSet& fs, const MaterialModel& m, const Point& x,
                                   const ScalingDims& dims, const EvalOptions& opts = {});

/// Divergences via central differences of the pointwise currents.
BalanceResiduals balance_residuals_fd(const FieldSet& fs, const MaterialModel& m, const Point& x,
                                      const ScalingDims& dims, const EvalOptions& opts = {}, double h = 1e-5);

}  // namespace micromorph
