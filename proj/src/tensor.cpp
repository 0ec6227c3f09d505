#include "micromorph/tensor.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace micromorph {
namespace {

constexpr std::size_t kMaxGroupOrder = 10000;

void decompose(std::size_t offset, int rank, std::array<int, kMaxRank>& idx) {
  for (int k = rank - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(offset % kDim);
    offset /= kDim;
  }
}

std::size_t compose_offset(const std::array<int, kMaxRank>& idx, int rank) {
  std::size_t off = 0;
  for (int k = 0; k < rank; ++k) off = off * kDim + static_cast<std::size_t>(idx[k]);
  return off;
}

// offset -> offset of the permuted index, t'(i_0..) = t(i_{p(0)}..).
std::vector<std::size_t> offset_map(const std::vector<int>& perm, int rank) {
  std::vector<std::size_t> map(tensor_size(rank));
  std::array<int, kMaxRank> idx{}, permuted{};
  for (std::size_t off = 0; off < map.size(); ++off) {
    decompose(off, rank, idx);
    for (int k = 0; k < rank; ++k) permuted[k] = idx[perm[k]];
    map[off] = compose_offset(permuted, rank);
  }
  return map;
}

std::vector<int> compose(const std::vector<int>& p, const std::vector<int>& q) {
  std::vector<int> r(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) r[k] = q[p[k]];
  return r;
}

void match_slots(std::vector<int>& remaining, std::vector<std::pair<int, int>>& current,
                 std::vector<std::vector<std::pair<int, int>>>& out) {
  if (remaining.empty()) {
    out.push_back(current);
    return;
  }
  const int first = remaining.front();
  for (std::size_t k = 1; k < remaining.size(); ++k) {
    const int partner = remaining[k];
    std::vector<int> rest;
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      if (j != k) rest.push_back(remaining[j]);
    }
    current.emplace_back(first, partner);
    match_slots(rest, current, out);
    current.pop_back();
  }
}

}  // namespace

Tensor contract(const Tensor& a, const Tensor& b, std::span<const SlotPair> pairing) {
  const int ra = a.rank();
  const int rb = b.rank();
  std::vector<bool> used_a(ra, false), used_b(rb, false);
  for (const auto& [sa, sb] : pairing) {
    if (sa < 0 || sa >= ra || sb < 0 || sb >= rb) throw ShapeError("contract: slot index out of range");
    if (used_a[sa] || used_b[sb]) throw ShapeError("contract: slot paired twice");
    used_a[sa] = used_b[sb] = true;
  }
  const int np = static_cast<int>(pairing.size());
  const int rr = ra + rb - 2 * np;
  if (rr > kMaxRank) throw ShapeError("contract: result rank exceeds 6");

  std::vector<int> free_a, free_b;
  for (int s = 0; s < ra; ++s) {
    if (!used_a[s]) free_a.push_back(s);
  }
  for (int s = 0; s < rb; ++s) {
    if (!used_b[s]) free_b.push_back(s);
  }

  Tensor result(rr);
  const std::size_t n_sum = tensor_size(np);
  std::array<int, kMaxRank> out_idx{}, sum_idx{}, ia{}, ib{};
  for (std::size_t ro = 0; ro < result.size(); ++ro) {
    decompose(ro, rr, out_idx);
    for (std::size_t k = 0; k < free_a.size(); ++k) ia[free_a[k]] = out_idx[k];
    for (std::size_t k = 0; k < free_b.size(); ++k) ib[free_b[k]] = out_idx[free_a.size() + k];
    double acc = 0.0;
    for (std::size_t so = 0; so < n_sum; ++so) {
      decompose(so, np, sum_idx);
      for (int p = 0; p < np; ++p) {
        ia[pairing[p].first] = sum_idx[p];
        ib[pairing[p].second] = sum_idx[p];
      }
      acc += a[compose_offset(ia, ra)] * b[compose_offset(ib, rb)];
    }
    result[ro] = acc;
  }
  return result;
}

SymmetrySpec& SymmetrySpec::with_blocks(std::vector<int> a, std::vector<int> b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("symmetry blocks must be non-empty and of equal length");
  relations_.push_back({std::move(a), std::move(b)});
  return *this;
}

std::vector<std::vector<int>> SymmetrySpec::permutations(int rank) const {
  std::vector<std::vector<int>> perms;
  for (const auto& rel : relations_) {
    std::vector<int> p(rank);
    std::iota(p.begin(), p.end(), 0);
    std::set<int> touched;
    for (std::size_t k = 0; k < rel.first.size(); ++k) {
      const int s = rel.first[k];
      const int t = rel.second[k];
      if (s < 0 || s >= rank || t < 0 || t >= rank) {
        throw ShapeError("symmetry relation references slot outside rank " + std::to_string(rank));
      }
      if (!touched.insert(s).second || !touched.insert(t).second) {
        throw ShapeError("symmetry relation uses a slot twice");
      }
      p[s] = t;
      p[t] = s;
    }
    perms.push_back(std::move(p));
  }
  return perms;
}

bool check_symmetry(const Tensor& t, const SymmetrySpec& spec, double tol) {
  for (const auto& perm : spec.permutations(t.rank())) {
    const auto map = offset_map(perm, t.rank());
    for (std::size_t off = 0; off < t.size(); ++off) {
      if (std::abs(t[off] - t[map[off]]) > tol) return false;
    }
  }
  return true;
}

Tensor symmetrize(const Tensor& t, const SymmetrySpec& spec) {
  const int rank = t.rank();
  const auto generators = spec.permutations(rank);
  if (generators.empty()) return t;

  std::vector<int> identity(rank);
  std::iota(identity.begin(), identity.end(), 0);
  std::set<std::vector<int>> group{identity};
  std::deque<std::vector<int>> frontier{identity};
  while (!frontier.empty()) {
    const auto g = frontier.front();
    frontier.pop_front();
    for (const auto& h : generators) {
      auto gh = compose(g, h);
      if (group.insert(gh).second) {
        if (group.size() > kMaxGroupOrder) throw ShapeError("symmetry group too large");
        frontier.push_back(std::move(gh));
      }
    }
  }

  Tensor out(rank);
  for (const auto& g : group) {
    const auto map = offset_map(g, rank);
    for (std::size_t off = 0; off < t.size(); ++off) out[off] += t[map[off]];
  }
  out *= 1.0 / static_cast<double>(group.size());
  return out;
}

std::vector<Tensor> isotropic_basis(int rank) {
  if (rank != 4 && rank != 6) {
    throw ShapeError("isotropic_basis supports ranks 4 and 6 only, got " + std::to_string(rank));
  }
  std::vector<int> slots(rank);
  std::iota(slots.begin(), slots.end(), 0);
  std::vector<std::pair<int, int>> current;
  std::vector<std::vector<std::pair<int, int>>> matchings;
  match_slots(slots, current, matchings);

  std::vector<Tensor> basis;
  std::array<int, kMaxRank> idx{};
  for (const auto& matching : matchings) {
    Tensor e(rank);
    for (std::size_t off = 0; off < e.size(); ++off) {
      decompose(off, rank, idx);
      bool all = std::all_of(matching.begin(), matching.end(),
                             [&](const auto& pr) { return idx[pr.first] == idx[pr.second]; });
      e[off] = all ? 1.0 : 0.0;
    }
    basis.push_back(std::move(e));
  }
  return basis;
}

Tensor rotate(const Tensor& t, const Tensor& rotation, double tol) {
  if (rotation.rank() != 2) throw ShapeError("rotation must be rank 2");
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      double rtr = 0.0;
      for (int k = 0; k < kDim; ++k) rtr += rotation(k, i) * rotation(k, j);
      if (std::abs(rtr - (i == j ? 1.0 : 0.0)) > tol) throw NumericError("rotation matrix is not orthogonal");
    }
  }

  const int rank = t.rank();
  Tensor current = t;
  std::array<int, kMaxRank> idx{};
  for (int slot = 0; slot < rank; ++slot) {
    Tensor next(rank);
    for (std::size_t off = 0; off < next.size(); ++off) {
      decompose(off, rank, idx);
      const int i = idx[slot];
      double acc = 0.0;
      for (int a = 0; a < kDim; ++a) {
        idx[slot] = a;
        acc += rotation(i, a) * current[compose_offset(idx, rank)];
      }
      next[off] = acc;
    }
    current = std::move(next);
  }
  return current;
}

Tensor kronecker_delta() {
  Tensor d(2);
  for (int i = 0; i < kDim; ++i) d(i, i) = 1.0;
  return d;
}

Tensor levi_civita() {
  Tensor e(3);
  e(0, 1, 2) = e(1, 2, 0) = e(2, 0, 1) = 1.0;
  e(0, 2, 1) = e(2, 1, 0) = e(1, 0, 2) = -1.0;
  return e;
}

Tensor outer(const Tensor& a, const Tensor& b) { return contract(a, b, std::span<const SlotPair>{}); }

double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.entries()) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.entries()) s += v * v;
  return std::sqrt(s);
}

double max_abs_difference(const Tensor& a, const Tensor& b) {
  if (a.rank() != b.rank()) throw ShapeError("rank mismatch in max_abs_difference");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

Tensor rotation_about_axis(const Point& axis, double angle) {
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (len == 0.0) throw NumericError("rotation axis must be non-zero");
  const double n[3] = {axis[0] / len, axis[1] / len, axis[2] / len};
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Tensor eps = levi_civita();
  Tensor r(2);
  // Rodrigues: R_ij = c d_ij + (1-c) n_i n_j - s e_ijk n_k
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      double v = (i == j ? c : 0.0) + (1.0 - c) * n[i] * n[j];
      for (int k = 0; k < kDim; ++k) v -= s * eps(i, j, k) * n[k];
      r(i, j) = v;
    }
  }
  return r;
}

}  // namespace micromorph
