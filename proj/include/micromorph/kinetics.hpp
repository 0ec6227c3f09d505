#pragma once

// Pointwise kinematics, constitutive law, and energy of linear micromorphic
// elasticity. Every routine is a template over the scalar type so the same
// code runs on plain doubles and on dual numbers (exact total derivatives and
// canonical partials).
//
//   gamma_kl = u_{k,l} - phi_kl,  e_kl = (phi_kl + phi_lk)/2,  kappa_klm = phi_{kl,m}
//   t_ij  = A_ijkl gamma_kl + E_ijkl e_kl + F_ijklm kappa_klm
//   s_ij  = E_klij gamma_kl + B_ijkl e_kl + G_ijklm kappa_klm
//   m_ijk = F_lmijk gamma_lm + G_lmijk e_lm + C_ijklmn kappa_lmn
//   W = t:gamma/2 + s:e/2 + m:kappa/2 - u.F - phi:L
//
// Note the transposed placement of E in the micro-stress: the strain pair of
// E_klij is the FIRST index pair.

#include <algorithm>
#include <cmath>
#include <utility>

#include "micromorph/dual.hpp"
#include "micromorph/fields.hpp"
#include "micromorph/material.hpp"

namespace micromorph {

template <class S>
struct StrainState {
  BasicTensor<S> gamma{2};  // relative distortion
  BasicTensor<S> e{2};      // micro-strain, symmetric
  BasicTensor<S> kappa{3};  // wryness
};

template <class S>
struct StressState {
  BasicTensor<S> t{2};  // force stress
  BasicTensor<S> s{2};  // micro-stress, symmetric
  BasicTensor<S> m{3};  // stress moment
};

struct EvalOptions {
  /// Drop -u.F - phi:L from the energy entering the fluxes. Off by default;
  /// the balance laws only close with the full energy.
  bool energy_without_sources = false;
};

template <class S>
StrainState<S> strains(const BasicTensor<S>& grad_u, const BasicTensor<S>& phi, const BasicTensor<S>& grad_phi) {
  StrainState<S> st;
  for (int k = 0; k < kDim; ++k) {
    for (int l = 0; l < kDim; ++l) {
      st.gamma(k, l) = grad_u(k, l) - phi(k, l);
      st.e(k, l) = 0.5 * (phi(k, l) + phi(l, k));
    }
  }
  st.kappa = grad_phi;
  return st;
}

template <class S>
StrainState<S> strains(const FieldArgs<S>& a) {
  return strains(a.grad_u, a.phi, a.grad_phi);
}

/// Constitutive stresses. The micro-stress is checked for symmetry (relative
/// to max(1, |s|)) and then symmetrized; a violation throws ConstitutiveError.
template <class M, class S>
StressState<S> stresses(const MaterialPoint<M>& mat, const StrainState<S>& st, double symmetry_tol = 1e-12) {
  StressState<S> out;
  const auto& g = st.gamma.entries();
  const auto& e = st.e.entries();
  const auto& k = st.kappa.entries();

  for (int a = 0; a < 9; ++a) {
    S t(0.0), s(0.0);
    for (int b = 0; b < 9; ++b) {
      t += mat.A[a * 9 + b] * g[b] + mat.E[a * 9 + b] * e[b];
      s += mat.E[b * 9 + a] * g[b] + mat.B[a * 9 + b] * e[b];
    }
    for (int c = 0; c < 27; ++c) {
      t += mat.F[a * 27 + c] * k[c];
      s += mat.G[a * 27 + c] * k[c];
    }
    out.t[a] = t;
    out.s[a] = s;
  }
  for (int c = 0; c < 27; ++c) {
    S m(0.0);
    for (int b = 0; b < 9; ++b) m += mat.F[b * 27 + c] * g[b] + mat.G[b * 27 + c] * e[b];
    for (int d = 0; d < 27; ++d) m += mat.C[c * 27 + d] * k[d];
    out.m[c] = m;
  }

  double scale = 1.0;
  double asym = 0.0;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      scale = std::max(scale, std::abs(value_of(out.s(i, j))));
      asym = std::max(asym, std::abs(value_of(out.s(i, j)) - value_of(out.s(j, i))));
    }
  }
  if (asym > symmetry_tol * scale) {
    throw ConstitutiveError("micro-stress is not symmetric; constitutive tensors violate E_ijkl = E_ijlk or "
                            "G_ijklm = G_jiklm or the minor symmetries of B");
  }
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) {
      const S avg = 0.5 * (out.s(i, j) + out.s(j, i));
      out.s(i, j) = avg;
      out.s(j, i) = avg;
    }
  }
  return out;
}

template <class S>
S elastic_energy(const StrainState<S>& st, const StressState<S>& ss) {
  S w(0.0);
  for (int a = 0; a < 9; ++a) w += 0.5 * (ss.t[a] * st.gamma[a] + ss.s[a] * st.e[a]);
  for (int c = 0; c < 27; ++c) w += 0.5 * ss.m[c] * st.kappa[c];
  return w;
}

/// -u.F - phi:L
template <class S>
S source_energy(const BasicTensor<S>& u, const BasicTensor<S>& phi, const BasicTensor<S>& force,
                const BasicTensor<S>& couple) {
  S w(0.0);
  for (int a = 0; a < 3; ++a) w -= u[a] * force[a];
  for (int a = 0; a < 9; ++a) w -= phi[a] * couple[a];
  return w;
}

template <class S>
S energy(const StrainState<S>& st, const StressState<S>& ss, const BasicTensor<S>& u, const BasicTensor<S>& phi,
         const BasicTensor<S>& force, const BasicTensor<S>& couple) {
  return elastic_energy(st, ss) + source_energy(u, phi, force, couple);
}

/// Everything pointwise at one x: field arguments, constitutive tensors,
/// strains, stresses and the energy density entering the fluxes.
template <class S>
struct PointState {
  FieldArgs<S> args;
  MaterialPoint<S> material;
  StrainState<S> strain;
  StressState<S> stress;
  S energy{0.0};
};

template <class S>
PointState<S> make_point_state(FieldArgs<S> args, MaterialPoint<S> material, const EvalOptions& opts = {}) {
  PointState<S> ps{std::move(args), std::move(material), {}, {}, S(0.0)};
  ps.strain = strains(ps.args);
  ps.stress = stresses(ps.material, ps.strain);
  ps.energy = elastic_energy(ps.strain, ps.stress);
  if (!opts.energy_without_sources) {
    ps.energy += source_energy(ps.args.u, ps.args.phi, ps.args.force, ps.args.couple);
  }
  return ps;
}

/// A double-valued point state together with the explicit x-gradients of the
/// material and of the prescribed sources (the ingredients of the
/// inhomogeneity force).
struct PointSample {
  PointState<double> state;
  MaterialGradient material_gradient;
  Tensor force_gradient{2};   // F_{a,k}
  Tensor couple_gradient{3};  // L_{ab,k}
};

PointSample sample_point(const FieldSet& fs, const MaterialModel& m, const Point& x, const EvalOptions& opts = {},
                         bool check_domain = true);

/// Point state whose derivative slots carry the total derivative D_i.
PointState<Dual3> sample_point_dual(const FieldSet& fs, const MaterialModel& m, const Point& x,
                                    const EvalOptions& opts = {});

struct ElResidual {
  Tensor momentum{1};  // D_i t_ai + F_a
  Tensor micro{2};     // D_i m_abi + (t_ab - s_ab) + L_ab
};

ElResidual euler_lagrange_residual(const FieldSet& fs, const MaterialModel& m, const Point& x);

double max_norm(const ElResidual& r);

}  // namespace micromorph
