#include "micromorph/material.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace micromorph {

TensorField::TensorField(int rank) : rank_(rank) {
  if (rank < 0 || rank > kMaxRank) throw ShapeError("tensor field rank out of range");
  compile();
}

TensorField::TensorField(int rank, std::vector<TensorTerm> terms) : rank_(rank), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.coefficient.rank() != rank_) {
      throw ShapeError("tensor field term has rank " + std::to_string(t.coefficient.rank()) + ", expected " +
                       std::to_string(rank_));
    }
  }
  compile();
}

TensorField TensorField::constant(Tensor value) {
  const int rank = value.rank();
  return TensorField(rank, {TensorTerm{Expression(1.0), std::move(value)}});
}

void TensorField::compile() {
  std::vector<Expression> roots;
  Differentiator d;
  homogeneous_ = true;
  for (const auto& t : terms_) {
    roots.push_back(t.profile);
    for (int k = 0; k < kDim; ++k) {
      Expression dk = d(t.profile, k);
      homogeneous_ = homogeneous_ && dk.is_zero();
      roots.push_back(std::move(dk));
    }
  }
  program_ = Program(roots);
}

void TensorField::value_and_gradient(const Point& x, Tensor& value, std::array<Tensor, kDim>& gradient) const {
  value = Tensor(rank_);
  for (auto& g : gradient) g = Tensor(rank_);
  if (terms_.empty()) return;
  const std::vector<double> p = program_.evaluate(x);
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const Tensor& c = terms_[t].coefficient;
    const double* pt = &p[4 * t];
    for (std::size_t off = 0; off < c.size(); ++off) {
      const double ci = c[off];
      if (ci == 0.0) continue;
      value[off] += pt[0] * ci;
      for (int k = 0; k < kDim; ++k) gradient[k][off] += pt[1 + k] * ci;
    }
  }
}

Tensor TensorField::value(const Point& x) const {
  Tensor v;
  std::array<Tensor, kDim> g;
  value_and_gradient(x, v, g);
  return v;
}

std::array<Tensor, kDim> TensorField::gradient(const Point& x) const {
  Tensor v;
  std::array<Tensor, kDim> g;
  value_and_gradient(x, v, g);
  return g;
}

TensorField TensorField::symmetrized(const SymmetrySpec& spec, double& max_change) const {
  std::vector<TensorTerm> terms;
  max_change = 0.0;
  for (const auto& t : terms_) {
    Tensor s = symmetrize(t.coefficient, spec);
    max_change = std::max(max_change, max_abs_difference(s, t.coefficient));
    terms.push_back({t.profile, std::move(s)});
  }
  return TensorField(rank_, std::move(terms));
}

int rank_of(ConstitutiveTensor which) {
  switch (which) {
    case ConstitutiveTensor::kC: return 6;
    case ConstitutiveTensor::kF:
    case ConstitutiveTensor::kG: return 5;
    default: return 4;
  }
}

const char* name_of(ConstitutiveTensor which) {
  switch (which) {
    case ConstitutiveTensor::kA: return "A";
    case ConstitutiveTensor::kB: return "B";
    case ConstitutiveTensor::kC: return "C";
    case ConstitutiveTensor::kE: return "E";
    case ConstitutiveTensor::kF: return "F";
    case ConstitutiveTensor::kG: return "G";
  }
  return "?";
}

SymmetrySpec symmetry_of(ConstitutiveTensor which) {
  switch (which) {
    case ConstitutiveTensor::kA: return SymmetrySpec::blocks({0, 1}, {2, 3});
    case ConstitutiveTensor::kB: return SymmetrySpec::blocks({0, 1}, {2, 3}).with_pair(0, 1).with_pair(2, 3);
    case ConstitutiveTensor::kC: return SymmetrySpec::blocks({0, 1, 2}, {3, 4, 5});
    case ConstitutiveTensor::kE: return SymmetrySpec::pair(0, 1).with_pair(2, 3);
    case ConstitutiveTensor::kF: return SymmetrySpec{};
    case ConstitutiveTensor::kG: return SymmetrySpec::pair(0, 1);
  }
  return SymmetrySpec{};
}

MaterialModel::MaterialModel() = default;

const TensorField& MaterialModel::field(ConstitutiveTensor which) const {
  switch (which) {
    case ConstitutiveTensor::kA: return A_;
    case ConstitutiveTensor::kB: return B_;
    case ConstitutiveTensor::kC: return C_;
    case ConstitutiveTensor::kE: return E_;
    case ConstitutiveTensor::kF: return F_;
    case ConstitutiveTensor::kG: return G_;
  }
  return A_;
}

bool MaterialModel::homogeneous() const noexcept {
  return A_.homogeneous() && B_.homogeneous() && C_.homogeneous() && E_.homogeneous() && F_.homogeneous() &&
         G_.homogeneous();
}

MaterialPoint<double> MaterialModel::evaluate(const Point& x) const {
  return {A_.value(x), B_.value(x), C_.value(x), E_.value(x), F_.value(x), G_.value(x)};
}

void MaterialModel::evaluate_with_gradient(const Point& x, MaterialPoint<double>& value,
                                           MaterialGradient& gradient) const {
  std::array<Tensor, kDim> g;
  auto fill = [&](const TensorField& f, Tensor MaterialPoint<double>::*member) {
    f.value_and_gradient(x, value.*member, g);
    for (int k = 0; k < kDim; ++k) gradient[k].*member = std::move(g[k]);
  };
  fill(A_, &MaterialPoint<double>::A);
  fill(B_, &MaterialPoint<double>::B);
  fill(C_, &MaterialPoint<double>::C);
  fill(E_, &MaterialPoint<double>::E);
  fill(F_, &MaterialPoint<double>::F);
  fill(G_, &MaterialPoint<double>::G);
}

double MaterialModel::smallest_energy_eigenvalue(const Point& x) const {
  const MaterialPoint<double> mp = evaluate(x);
  // W = 1/2 z^T H z with z = (gamma[9], e[9], kappa[27]).
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(45, 45);
  for (int a = 0; a < 9; ++a) {
    for (int b = 0; b < 9; ++b) {
      H(a, b) = mp.A[a * 9 + b];
      H(a, 9 + b) = mp.E[a * 9 + b];
      H(9 + b, a) = mp.E[a * 9 + b];
      H(9 + a, 9 + b) = mp.B[a * 9 + b];
    }
    for (int c = 0; c < 27; ++c) {
      H(a, 18 + c) = H(18 + c, a) = mp.F[a * 27 + c];
      H(9 + a, 18 + c) = H(18 + c, 9 + a) = mp.G[a * 27 + c];
    }
  }
  for (int a = 0; a < 27; ++a) {
    for (int b = 0; b < 27; ++b) H(18 + a, 18 + b) = mp.C[a * 27 + b];
  }

  // Orthonormal basis restricting e to symmetric matrices.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(45, 42);
  for (int a = 0; a < 9; ++a) Q(a, a) = 1.0;
  int col = 9;
  for (int i = 0; i < kDim; ++i) {
    for (int j = i; j < kDim; ++j, ++col) {
      if (i == j) {
        Q(9 + i * 3 + j, col) = 1.0;
      } else {
        Q(9 + i * 3 + j, col) = Q(9 + j * 3 + i, col) = std::sqrt(0.5);
      }
    }
  }
  for (int a = 0; a < 27; ++a) Q(18 + a, 15 + a) = 1.0;

  Eigen::MatrixXd reduced = Q.transpose() * H * Q;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

MaterialModel make_anisotropic(TensorField A, TensorField B, TensorField C, TensorField E, TensorField F,
                               TensorField G) {
  MaterialModel m;
  double change = 0.0;
  auto take = [&](TensorField& in, TensorField& out, ConstitutiveTensor which) {
    if (in.rank() != rank_of(which)) {
      throw ShapeError(std::string("constitutive tensor ") + name_of(which) + " must have rank " +
                       std::to_string(rank_of(which)) + ", got " + std::to_string(in.rank()));
    }
    double c = 0.0;
    out = in.symmetrized(symmetry_of(which), c);
    change = std::max(change, c);
  };
  take(A, m.A_, ConstitutiveTensor::kA);
  take(B, m.B_, ConstitutiveTensor::kB);
  take(C, m.C_, ConstitutiveTensor::kC);
  take(E, m.E_, ConstitutiveTensor::kE);
  take(F, m.F_, ConstitutiveTensor::kF);
  take(G, m.G_, ConstitutiveTensor::kG);
  m.symmetrization_change_ = change;
  return m;
}

MaterialModel make_isotropic(const IsotropicSpec& spec) {
  const auto basis4 = isotropic_basis(4);
  const auto basis6 = isotropic_basis(6);
  auto combine = [](const auto& coeffs, const std::vector<Tensor>& basis, ConstitutiveTensor which,
                    const Expression& profile) {
    Tensor t(basis.front().rank());
    for (std::size_t k = 0; k < basis.size(); ++k) t += coeffs[k] * basis[k];
    t = symmetrize(t, symmetry_of(which));
    return TensorField(t.rank(), {TensorTerm{profile, std::move(t)}});
  };
  MaterialModel m;
  m.A_ = combine(spec.A, basis4, ConstitutiveTensor::kA, spec.profile_A);
  m.B_ = combine(spec.B, basis4, ConstitutiveTensor::kB, spec.profile_B);
  m.C_ = combine(spec.C, basis6, ConstitutiveTensor::kC, spec.profile_C);
  m.E_ = combine(spec.E, basis4, ConstitutiveTensor::kE, spec.profile_E);
  m.isotropic_ = true;
  return m;
}

MaterialGradient material_gradient(const MaterialModel& m, const Point& x) {
  MaterialPoint<double> value;
  MaterialGradient gradient;
  m.evaluate_with_gradient(x, value, gradient);
  return gradient;
}

}  // namespace micromorph
