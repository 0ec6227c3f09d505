#include "micromorph/currents.hpp"

namespace micromorph {
namespace {

using Dual36 = Dual<36>;

const Tensor& epsilon() {
  static const Tensor e = levi_civita();
  return e;
}

// a . M . b with M a flat (na x nb) block.
double bilinear(std::span<const double> a, std::span<const double> M, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) row += M[i * b.size() + j] * b[j];
    acc += a[i] * row;
  }
  return acc;
}

}  // namespace

ScalingDims ScalingDims::for_dimension(int n) {
  return ScalingDims{-(n - 2) / 2.0, -n / 2.0, n};
}

EnergyPartials energy_partials(const PointState<double>& ps, const EvalOptions& opts) {
  BasicTensor<Dual36> grad_u(2), grad_phi(3);
  for (int a = 0; a < 9; ++a) grad_u[a] = Dual36(ps.args.grad_u[a], a);
  for (int c = 0; c < 27; ++c) grad_phi[c] = Dual36(ps.args.grad_phi[c], 9 + c);
  const BasicTensor<Dual36> phi(ps.args.phi);

  const StrainState<Dual36> st = strains(grad_u, phi, grad_phi);
  const StressState<Dual36> ss = stresses(ps.material, st);
  Dual36 w = elastic_energy(st, ss);
  if (!opts.energy_without_sources) {
    w += source_energy(BasicTensor<Dual36>(ps.args.u), phi, BasicTensor<Dual36>(ps.args.force),
                       BasicTensor<Dual36>(ps.args.couple));
  }

  EnergyPartials d;
  for (int a = 0; a < 9; ++a) d.d_grad_u[a] = w.v[a];
  for (int c = 0; c < 27; ++c) d.d_grad_phi[c] = w.v[9 + c];
  return d;
}

Tensor eshelby_stress_canonical(const PointState<double>& ps, const EnergyPartials& d) {
  const auto& gu = ps.args.grad_u;
  const auto& gp = ps.args.grad_phi;
  Tensor P(2);
  for (int k = 0; k < kDim; ++k) {
    for (int i = 0; i < kDim; ++i) {
      double v = k == i ? ps.energy : 0.0;
      for (int a = 0; a < kDim; ++a) {
        v -= gu(a, k) * d.d_grad_u(a, i);
        for (int b = 0; b < kDim; ++b) v -= gp(a, b, k) * d.d_grad_phi(a, b, i);
      }
      P(k, i) = v;
    }
  }
  return P;
}

Tensor angular_momentum_canonical(const PointState<double>& ps, const EnergyPartials& d) {
  const Tensor& eps = epsilon();
  const auto& x = ps.args.x;
  const auto& u = ps.args.u;
  const auto& phi = ps.args.phi;
  const auto& gu = ps.args.grad_u;
  const auto& gp = ps.args.grad_phi;
  const auto& dU = d.d_grad_u;
  const auto& dP = d.d_grad_phi;
  Tensor M(2);
  for (int k = 0; k < kDim; ++k) {
    for (int i = 0; i < kDim; ++i) {
      double v = 0.0;
      for (int j = 0; j < kDim; ++j) {
        v += eps(k, j, i) * x[j] * ps.energy;
        for (int a = 0; a < kDim; ++a) {
          const double e = eps(k, j, a);
          if (e == 0.0) continue;
          double inner = u[j] * dU(a, i);
          for (int l = 0; l < kDim; ++l) inner += phi(j, l) * dP(a, l, i) + phi(l, j) * dP(l, a, i);
          v += e * inner;
        }
        for (int n = 0; n < kDim; ++n) {
          const double e = eps(k, j, n);
          if (e == 0.0) continue;
          double inner = 0.0;
          for (int a = 0; a < kDim; ++a) {
            inner += gu(a, n) * dU(a, i);
            for (int b = 0; b < kDim; ++b) inner += gp(a, b, n) * dP(a, b, i);
          }
          v -= e * x[j] * inner;
        }
      }
      M(k, i) = v;
    }
  }
  return M;
}

Tensor scaling_flux_canonical(const PointState<double>& ps, const EnergyPartials& d, const ScalingDims& dims) {
  const auto& x = ps.args.x;
  const auto& u = ps.args.u;
  const auto& phi = ps.args.phi;
  const auto& gu = ps.args.grad_u;
  const auto& gp = ps.args.grad_phi;
  Tensor Y(1);
  for (int i = 0; i < kDim; ++i) {
    double v = x[i] * ps.energy;
    for (int a = 0; a < kDim; ++a) {
      double cu = dims.d_u * u[a];
      for (int k = 0; k < kDim; ++k) cu -= x[k] * gu(a, k);
      v += cu * d.d_grad_u(a, i);
      for (int b = 0; b < kDim; ++b) {
        double cp = dims.d_phi * phi(a, b);
        for (int k = 0; k < kDim; ++k) cp -= x[k] * gp(a, b, k);
        v += cp * d.d_grad_phi(a, b, i);
      }
    }
    Y[i] = v;
  }
  return Y;
}

GeneratorTriple GeneratorTriple::translation() {
  GeneratorTriple g;
  g.components = 3;
  g.X = [](int k, const FieldArgs<double>&) {
    Tensor X(1);
    X[k] = 1.0;
    return X;
  };
  g.U = [](int, const FieldArgs<double>&) { return Tensor(1); };
  g.Phi = [](int, const FieldArgs<double>&) { return Tensor(2); };
  return g;
}

GeneratorTriple GeneratorTriple::rotation() {
  GeneratorTriple g;
  g.components = 3;
  // x'_i = x_i + e_kji x_j eps_k
  g.X = [](int k, const FieldArgs<double>& a) {
    const Tensor& eps = epsilon();
    Tensor X(1);
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) X[i] += eps(k, j, i) * a.x[j];
    }
    return X;
  };
  // u'_a = u_a + e_kba u_b eps_k
  g.U = [](int k, const FieldArgs<double>& a) {
    const Tensor& eps = epsilon();
    Tensor U(1);
    for (int al = 0; al < kDim; ++al) {
      for (int b = 0; b < kDim; ++b) U[al] += eps(k, b, al) * a.u[b];
    }
    return U;
  };
  // phi'_ab = phi_ab + (e_kja phi_jb + e_kjb phi_aj) eps_k
  g.Phi = [](int k, const FieldArgs<double>& a) {
    const Tensor& eps = epsilon();
    Tensor Phi(2);
    for (int al = 0; al < kDim; ++al) {
      for (int b = 0; b < kDim; ++b) {
        double v = 0.0;
        for (int j = 0; j < kDim; ++j) v += eps(k, j, al) * a.phi(j, b) + eps(k, j, b) * a.phi(al, j);
        Phi(al, b) = v;
      }
    }
    return Phi;
  };
  return g;
}

GeneratorTriple GeneratorTriple::scaling(const ScalingDims& dims) {
  GeneratorTriple g;
  g.components = 1;
  g.X = [](int, const FieldArgs<double>& a) { return Tensor(1, {a.x[0], a.x[1], a.x[2]}); };
  g.U = [d = dims.d_u](int, const FieldArgs<double>& a) { return d * a.u; };
  g.Phi = [d = dims.d_phi](int, const FieldArgs<double>& a) { return d * a.phi; };
  return g;
}

std::vector<Tensor> general_flux(const GeneratorTriple& g, const PointState<double>& ps) {
  const auto& gu = ps.args.grad_u;
  const auto& gp = ps.args.grad_phi;
  const auto& t = ps.stress.t;
  const auto& m = ps.stress.m;
  std::vector<Tensor> out;
  for (int c = 0; c < g.components; ++c) {
    const Tensor X = g.X(c, ps.args);
    const Tensor U = g.U(c, ps.args);
    const Tensor Phi = g.Phi(c, ps.args);
    Tensor A(1);
    for (int i = 0; i < kDim; ++i) {
      double v = X[i] * ps.energy;
      for (int a = 0; a < kDim; ++a) {
        v += U[a] * t(a, i);
        for (int b = 0; b < kDim; ++b) v += Phi(a, b) * m(a, b, i);
      }
      for (int j = 0; j < kDim; ++j) {
        if (X[j] == 0.0) continue;
        double inner = 0.0;
        for (int a = 0; a < kDim; ++a) {
          inner += gu(a, j) * t(a, i);
          for (int b = 0; b < kDim; ++b) inner += gp(a, b, j) * m(a, b, i);
        }
        v -= X[j] * inner;
      }
      A[i] = v;
    }
    out.push_back(std::move(A));
  }
  return out;
}

Tensor inhomogeneity_force(const PointSample& sample) {
  const auto& st = sample.state.strain;
  const auto& args = sample.state.args;
  const auto g = st.gamma.entries();
  const auto e = st.e.entries();
  const auto k = st.kappa.entries();
  Tensor f(1);
  for (int d = 0; d < kDim; ++d) {
    const MaterialPoint<double>& dm = sample.material_gradient[d];
    const double q = 0.5 * bilinear(g, dm.A.entries(), g) + bilinear(g, dm.E.entries(), e) +
                     0.5 * bilinear(e, dm.B.entries(), e) + bilinear(g, dm.F.entries(), k) +
                     bilinear(e, dm.G.entries(), k) + 0.5 * bilinear(k, dm.C.entries(), k);
    double v = -q;
    for (int a = 0; a < kDim; ++a) {
      v += args.u[a] * sample.force_gradient(a, d);
      for (int b = 0; b < kDim; ++b) v += args.phi(a, b) * sample.couple_gradient(a, b, d);
    }
    f[d] = v;
  }
  return f;
}

Tensor isotropy_bracket(const PointState<double>& ps) {
  const auto& g = ps.strain.gamma;
  const auto& e = ps.strain.e;
  const auto& kap = ps.strain.kappa;
  const auto& t = ps.stress.t;
  const auto& s = ps.stress.s;
  const auto& m = ps.stress.m;
  Tensor inner(2);  // indexed (j, n)
  for (int j = 0; j < kDim; ++j) {
    for (int n = 0; n < kDim; ++n) {
      double v = 0.0;
      for (int i = 0; i < kDim; ++i) {
        v += g(i, j) * t(i, n) + g(j, i) * t(n, i) + 2.0 * e(i, j) * s(i, n);
        for (int l = 0; l < kDim; ++l) {
          v += kap(i, j, l) * m(i, n, l) + kap(j, l, i) * m(n, l, i) + kap(l, i, j) * m(l, i, n);
        }
      }
      inner(j, n) = v;
    }
  }
  const Tensor& eps = epsilon();
  Tensor out(1);
  for (int k = 0; k < kDim; ++k) {
    for (int j = 0; j < kDim; ++j) {
      for (int n = 0; n < kDim; ++n) out[k] += eps(k, j, n) * inner(j, n);
    }
  }
  return out;
}

Tensor rotational_source(const PointSample& sample) {
  const auto& args = sample.state.args;
  const Tensor f = inhomogeneity_force(sample);
  const Tensor& eps = epsilon();
  Tensor out = isotropy_bracket(sample.state);
  for (int k = 0; k < kDim; ++k) {
    double v = 0.0;
    for (int j = 0; j < kDim; ++j) {
      for (int n = 0; n < kDim; ++n) {
        const double e = eps(k, j, n);
        if (e == 0.0) continue;
        double inner = args.x[j] * f[n] + args.u[j] * args.force[n];
        for (int i = 0; i < kDim; ++i) {
          inner += args.phi(j, i) * args.couple(n, i) + args.phi(i, j) * args.couple(i, n);
        }
        v += e * inner;
      }
    }
    out[k] -= v;
  }
  return out;
}

double scaling_source(const PointSample& sample, const ScalingDims& dims) {
  const auto& args = sample.state.args;
  const Tensor f = inhomogeneity_force(sample);
  double km = 0.0;
  for (int c = 0; c < 27; ++c) km += sample.state.strain.kappa[c] * sample.state.stress.m[c];
  double xf = 0.0, uF = 0.0, phiL = 0.0;
  for (int i = 0; i < kDim; ++i) {
    xf += args.x[i] * f[i];
    uF += args.u[i] * args.force[i];
  }
  for (int a = 0; a < 9; ++a) phiL += args.phi[a] * args.couple[a];
  return -km - xf - 0.5 * (dims.n + 2) * uF - 0.5 * dims.n * phiL;
}

double BalanceResiduals::max_norm() const {
  return std::max({max_abs(momentum), max_abs(angular), std::abs(scaling)});
}

namespace {

BalanceResiduals assemble(const PointSample& sample, const Tensor& divP, const Tensor& divM, double divY,
                          const ScalingDims& dims, const FieldSet& fs, const MaterialModel& m, const Point& x) {
  BalanceResiduals r;
  r.momentum = divP + inhomogeneity_force(sample);
  r.angular = divM - rotational_source(sample);
  r.scaling = divY - scaling_source(sample, dims);
  r.el_residual = max_norm(euler_lagrange_residual(fs, m, x));
  r.not_a_solution = r.el_residual > 1e-8;
  return r;
}

}  // namespace

BalanceResiduals balance_residuals(const FieldSet& fs, const MaterialModel& m, const Point& x,
                                   const ScalingDims& dims, const EvalOptions& opts) {
  const PointState<Dual3> ps = sample_point_dual(fs, m, x, opts);
  const BasicTensor<Dual3> P = eshelby_stress(ps);
  const BasicTensor<Dual3> M = angular_momentum(ps).total;
  const BasicTensor<Dual3> Y = scaling_flux(ps, dims);
  Tensor divP(1), divM(1);
  double divY = 0.0;
  for (int i = 0; i < kDim; ++i) {
    for (int k = 0; k < kDim; ++k) {
      divP[k] += P(k, i).v[i];
      divM[k] += M(k, i).v[i];
    }
    divY += Y[i].v[i];
  }
  return assemble(sample_point(fs, m, x, opts), divP, divM, divY, dims, fs, m, x);
}

BalanceResiduals balance_residuals_fd(const FieldSet& fs, const MaterialModel& m, const Point& x,
                                      const ScalingDims& dims, const EvalOptions& opts, double h) {
  auto state_at = [&](const Point& p) { return sample_point(fs, m, p, opts, false).state; };
  const Tensor divP = fd_divergence([&](const Point& p) { return eshelby_stress(state_at(p)); }, x, h);
  const Tensor divM = fd_divergence([&](const Point& p) { return angular_momentum(state_at(p)).total; }, x, h);
  const Tensor divY = fd_divergence([&](const Point& p) { return scaling_flux(state_at(p), dims); }, x, h);
  return assemble(sample_point(fs, m, x, opts), divP, divM, divY[0], dims, fs, m, x);
}

}  // namespace micromorph
