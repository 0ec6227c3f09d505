#pragma once

// Dense small tensors over three-dimensional space.
//
// Storage is flat and row-major: component (i1, ..., ir) of a rank-r tensor
// lives at offset sum_k i_k * 3^(r-k), zero-based indices. Slots are numbered
// from zero everywhere in the API.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "micromorph/error.hpp"

namespace micromorph {

inline constexpr int kDim = 3;
inline constexpr int kMaxRank = 6;

using Point = std::array<double, kDim>;

constexpr std::size_t tensor_size(int rank) {
  std::size_t n = 1;
  for (int i = 0; i < rank; ++i) n *= kDim;
  return n;
}

template <class T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() : BasicTensor(0) {}

  explicit BasicTensor(int rank) : rank_(checked_rank(rank)), data_(tensor_size(rank), T(0.0)) {}

  BasicTensor(int rank, std::vector<T> entries) : rank_(checked_rank(rank)), data_(std::move(entries)) {
    if (data_.size() != tensor_size(rank_)) {
      throw ShapeError("tensor of rank " + std::to_string(rank_) + " needs " +
                       std::to_string(tensor_size(rank_)) + " entries, got " + std::to_string(data_.size()));
    }
    if constexpr (std::is_same_v<T, double>) {
      for (double v : data_) {
        if (!std::isfinite(v)) throw ShapeError("tensor entries must be finite");
      }
    }
  }

  /// Converting constructor, e.g. double -> forward-mode dual with zero derivative.
  template <class U>
    requires(!std::is_same_v<U, T> && std::is_constructible_v<T, U>)
  explicit BasicTensor(const BasicTensor<U>& other) : rank_(other.rank()), data_(other.size()) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = T(other[k]);
  }

  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> entries() noexcept { return data_; }
  std::span<const T> entries() const noexcept { return data_; }

  T& operator[](std::size_t offset) { return data_[offset]; }
  const T& operator[](std::size_t offset) const { return data_[offset]; }

  template <std::integral... I>
  T& operator()(I... idx) {
    return data_[offset_of(idx...)];
  }
  template <std::integral... I>
  const T& operator()(I... idx) const {
    return data_[offset_of(idx...)];
  }

  T& at(std::span<const int> idx) { return data_[checked_offset(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[checked_offset(idx)]; }

  BasicTensor& operator+=(const BasicTensor& o) {
    require_same_rank(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  BasicTensor& operator-=(const BasicTensor& o) {
    require_same_rank(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  template <class U>
  BasicTensor& operator*=(const U& scale) {
    for (auto& v : data_) v *= scale;
    return *this;
  }

  friend BasicTensor operator+(BasicTensor a, const BasicTensor& b) { return a += b; }
  friend BasicTensor operator-(BasicTensor a, const BasicTensor& b) { return a -= b; }
  friend BasicTensor operator-(BasicTensor a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend BasicTensor operator*(BasicTensor a, const T& s) { return a *= s; }
  friend BasicTensor operator*(const T& s, BasicTensor a) { return a *= s; }

 private:
  static int checked_rank(int rank) {
    if (rank < 0 || rank > kMaxRank) throw ShapeError("tensor rank must lie in 0..6, got " + std::to_string(rank));
    return rank;
  }

  template <std::integral... I>
  std::size_t offset_of(I... idx) const {
    std::size_t off = 0;
    ((off = off * kDim + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  std::size_t checked_offset(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank_) throw ShapeError("index count does not match tensor rank");
    std::size_t off = 0;
    for (int i : idx) {
      if (i < 0 || i >= kDim) throw ShapeError("tensor index out of range");
      off = off * kDim + static_cast<std::size_t>(i);
    }
    return off;
  }

  void require_same_rank(const BasicTensor& o) const {
    if (o.rank_ != rank_) throw ShapeError("rank mismatch in tensor arithmetic");
  }

  int rank_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<double>;

/// Zero-based slot pair (slot of a, slot of b) summed over in `contract`.
using SlotPair = std::pair<int, int>;

/// Sum over the paired slots. Free slots of `a` come first, then those of `b`,
/// each in their original order.
Tensor contract(const Tensor& a, const Tensor& b, std::span<const SlotPair> pairing);
inline Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<SlotPair> pairing) {
  return contract(a, b, std::span<const SlotPair>(pairing.begin(), pairing.size()));
}

/// Index-symmetry relations. Each relation is a slot permutation under which
/// the tensor must be invariant.
class SymmetrySpec {
 public:
  struct Relation {
    std::vector<int> first;   // a single slot for pair exchange
    std::vector<int> second;  // block of the same length
  };

  SymmetrySpec() = default;

  static SymmetrySpec pair(int i, int j) { return SymmetrySpec{}.with_pair(i, j); }
  static SymmetrySpec blocks(std::vector<int> a, std::vector<int> b) {
    return SymmetrySpec{}.with_blocks(std::move(a), std::move(b));
  }

  SymmetrySpec& with_pair(int i, int j) { return with_blocks({i}, {j}); }
  SymmetrySpec& with_blocks(std::vector<int> a, std::vector<int> b);

  const std::vector<Relation>& relations() const noexcept { return relations_; }
  bool empty() const noexcept { return relations_.empty(); }

  /// Slot permutations of a rank-`rank` tensor, one per relation.
  std::vector<std::vector<int>> permutations(int rank) const;

 private:
  std::vector<Relation> relations_;
};

bool check_symmetry(const Tensor& t, const SymmetrySpec& spec, double tol);

/// Average over the permutation group generated by the relations.
Tensor symmetrize(const Tensor& t, const SymmetrySpec& spec);

/// All Kronecker-delta products of rank 4 (3 tensors) or 6 (15 tensors), in
/// lexicographic order of slot matchings: slot 0 paired with 1, 2, ... first.
std::vector<Tensor> isotropic_basis(int rank);

/// t'_{i...} = R_{ia} ... t_{a...} on every slot. R must be orthogonal within `tol`.
Tensor rotate(const Tensor& t, const Tensor& rotation, double tol = 1e-10);

Tensor kronecker_delta();
Tensor levi_civita();
Tensor outer(const Tensor& a, const Tensor& b);

double max_abs(const Tensor& t);
double frobenius_norm(const Tensor& t);
double max_abs_difference(const Tensor& a, const Tensor& b);

/// Unit-axis rotation matrix by `angle` radians about `axis`.
Tensor rotation_about_axis(const Point& axis, double angle);

}  // namespace micromorph
