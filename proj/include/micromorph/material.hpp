#pragma once

#include <array>
#include <string>
#include <vector>

#include "micromorph/expression.hpp"
#include "micromorph/tensor.hpp"

namespace micromorph {

/// One term of a position-dependent tensor: profile(x) * coefficient.
struct TensorTerm {
  Expression profile;
  Tensor coefficient;
};

/// A tensor field written as a finite sum of scalar profiles times constant
/// tensors. Gradients are exact because profiles are differentiated
/// symbolically.
class TensorField {
 public:
  explicit TensorField(int rank = 0);
  TensorField(int rank, std::vector<TensorTerm> terms);

  static TensorField constant(Tensor value);

  int rank() const noexcept { return rank_; }
  const std::vector<TensorTerm>& terms() const noexcept { return terms_; }

  /// True iff every profile derivative is identically zero.
  bool homogeneous() const noexcept { return homogeneous_; }

  Tensor value(const Point& x) const;

  /// Partial derivatives d/dx_k, one tensor of the field's rank per direction.
  std::array<Tensor, kDim> gradient(const Point& x) const;

  void value_and_gradient(const Point& x, Tensor& value, std::array<Tensor, kDim>& gradient) const;

  /// Copy with every coefficient replaced by `symmetrize(coefficient, spec)`.
  /// `max_change` receives the largest entry change.
  TensorField symmetrized(const SymmetrySpec& spec, double& max_change) const;

 private:
  void compile();

  int rank_;
  std::vector<TensorTerm> terms_;
  Program program_;  // per term: profile, d1, d2, d3
  bool homogeneous_ = true;
};

/// The six constitutive tensors evaluated at a point.
template <class S>
struct MaterialPoint {
  BasicTensor<S> A{4};
  BasicTensor<S> B{4};
  BasicTensor<S> C{6};
  BasicTensor<S> E{4};
  BasicTensor<S> F{5};
  BasicTensor<S> G{5};
};

/// d/dx_k of every constitutive tensor, indexed by k.
using MaterialGradient = std::array<MaterialPoint<double>, kDim>;

enum class ConstitutiveTensor { kA, kB, kC, kE, kF, kG };

int rank_of(ConstitutiveTensor which);
const char* name_of(ConstitutiveTensor which);

/// Index symmetries imposed on each constitutive tensor:
///   A_ijkl = A_klij
///   B_ijkl = B_klij = B_jikl = B_ijlk
///   C_ijklmn = C_lmnijk
///   E_ijkl = E_jikl = E_ijlk
///   G_ijklm = G_jiklm
///   F unrestricted
/// E also carries the exchange of its last two slots: these slots meet the
/// symmetric micro-strain, and the micro-stress s_ij = E_klij gamma_kl is only
/// symmetric if E is.
SymmetrySpec symmetry_of(ConstitutiveTensor which);

struct IsotropicSpec {
  std::array<double, 3> A{};   // over isotropic_basis(4)
  std::array<double, 3> B{};
  std::array<double, 15> C{};  // over isotropic_basis(6)
  std::array<double, 3> E{};
  // Scalar profiles multiplying each tensor; constant 1 gives a homogeneous medium.
  Expression profile_A{1.0};
  Expression profile_B{1.0};
  Expression profile_C{1.0};
  Expression profile_E{1.0};
};

class MaterialModel {
 public:
  /// Zero material.
  MaterialModel();

  const TensorField& field(ConstitutiveTensor which) const;
  const TensorField& A() const noexcept { return A_; }
  const TensorField& B() const noexcept { return B_; }
  const TensorField& C() const noexcept { return C_; }
  const TensorField& E() const noexcept { return E_; }
  const TensorField& F() const noexcept { return F_; }
  const TensorField& G() const noexcept { return G_; }

  bool homogeneous() const noexcept;
  bool isotropic() const noexcept { return isotropic_; }

  /// Set when a constructor had to change some input entry by more than 1e-12
  /// to restore the index symmetries.
  bool symmetrization_warning() const noexcept { return symmetrization_change_ > 1e-12; }
  double symmetrization_change() const noexcept { return symmetrization_change_; }

  MaterialPoint<double> evaluate(const Point& x) const;
  void evaluate_with_gradient(const Point& x, MaterialPoint<double>& value, MaterialGradient& gradient) const;

  /// Smallest eigenvalue of the quadratic strain energy at x, over the
  /// 42-dimensional space of (gamma, symmetric e, kappa). Diagnostic only.
  double smallest_energy_eigenvalue(const Point& x) const;

  friend MaterialModel make_anisotropic(TensorField, TensorField, TensorField, TensorField, TensorField,
                                        TensorField);
  friend MaterialModel make_isotropic(const IsotropicSpec&);

 private:
  TensorField A_{4}, B_{4}, C_{6}, E_{4}, F_{5}, G_{5};
  bool isotropic_ = false;
  double symmetrization_change_ = 0.0;
};

/// Symmetrizes each tensor per `symmetry_of`; rank mismatches throw ShapeError.
MaterialModel make_anisotropic(TensorField A, TensorField B, TensorField C, TensorField E, TensorField F,
                               TensorField G);

/// Isotropic model from delta-product bases, B and E projected onto their
/// symmetry classes; F = G = 0 since no rank-5 delta products exist.
MaterialModel make_isotropic(const IsotropicSpec& spec);

/// d/dx_k of the six tensors at x (zero tensors for homogeneous models).
MaterialGradient material_gradient(const MaterialModel& m, const Point& x);

}  // namespace micromorph
