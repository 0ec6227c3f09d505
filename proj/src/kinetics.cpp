#include "micromorph/kinetics.hpp"

namespace micromorph {
namespace {

BasicTensor<Dual3> seed(const Tensor& value, const std::array<Tensor, kDim>& gradient) {
  BasicTensor<Dual3> out(value.rank());
  for (std::size_t k = 0; k < value.size(); ++k) {
    Dual3 d(value[k]);
    for (int i = 0; i < kDim; ++i) d.v[i] = gradient[i][k];
    out[k] = d;
  }
  return out;
}

}  // namespace

PointSample sample_point(const FieldSet& fs, const MaterialModel& m, const Point& x, const EvalOptions& opts,
                         bool check_domain) {
  const JetBundle jets = check_domain ? fs.evaluate_jet(x) : fs.evaluate_jet_unchecked(x);
  MaterialPoint<double> mat;
  MaterialGradient grad;
  m.evaluate_with_gradient(x, mat, grad);
  return PointSample{make_point_state(field_args(jets, x), std::move(mat), opts), std::move(grad),
                     jets.force.gradient, jets.couple.gradient};
}

PointState<Dual3> sample_point_dual(const FieldSet& fs, const MaterialModel& m, const Point& x,
                                    const EvalOptions& opts) {
  const JetBundle jets = fs.evaluate_jet(x);
  MaterialPoint<double> mat;
  MaterialGradient grad;
  m.evaluate_with_gradient(x, mat, grad);

  auto lift = [&](Tensor MaterialPoint<double>::*member) {
    return seed(mat.*member, {grad[0].*member, grad[1].*member, grad[2].*member});
  };
  MaterialPoint<Dual3> dual_mat{lift(&MaterialPoint<double>::A), lift(&MaterialPoint<double>::B),
                                lift(&MaterialPoint<double>::C), lift(&MaterialPoint<double>::E),
                                lift(&MaterialPoint<double>::F), lift(&MaterialPoint<double>::G)};
  return make_point_state(seeded_field_args(jets, x), std::move(dual_mat), opts);
}

ElResidual euler_lagrange_residual(const FieldSet& fs, const MaterialModel& m, const Point& x) {
  const PointState<Dual3> ps = sample_point_dual(fs, m, x);
  const auto& t = ps.stress.t;
  const auto& s = ps.stress.s;
  const auto& mm = ps.stress.m;
  ElResidual r;
  for (int a = 0; a < kDim; ++a) {
    double div = 0.0;
    for (int i = 0; i < kDim; ++i) div += t(a, i).v[i];
    r.momentum[a] = div + ps.args.force[a].a;
    for (int b = 0; b < kDim; ++b) {
      double dm = 0.0;
      for (int i = 0; i < kDim; ++i) dm += mm(a, b, i).v[i];
      r.micro(a, b) = dm + (t(a, b).a - s(a, b).a) + ps.args.couple(a, b).a;
    }
  }
  return r;
}

double max_norm(const ElResidual& r) { return std::max(max_abs(r.momentum), max_abs(r.micro)); }

}  // namespace micromorph
