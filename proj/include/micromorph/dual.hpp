#pragma once

// Forward-mode dual numbers. ceres::Jet<double, N> carries a value and N
// directional derivatives; the library seeds them either with d/dx_i along a
// field configuration (total derivatives) or with d/d(field gradient) entries
// (canonical partials of the energy).

#include <ceres/jet.h>

#include "micromorph/tensor.hpp"

namespace micromorph {

template <int N>
using Dual = ceres::Jet<double, N>;

/// One derivative slot per spatial direction.
using Dual3 = Dual<kDim>;

inline double value_of(double v) noexcept { return v; }
template <int N>
double value_of(const Dual<N>& v) noexcept {
  return v.a;
}

template <class S>
Tensor values_of(const BasicTensor<S>& t) {
  if constexpr (std::is_same_v<S, double>) {
    return t;
  } else {
    Tensor out(t.rank());
    for (std::size_t k = 0; k < t.size(); ++k) out[k] = t[k].a;
    return out;
  }
}

/// Derivative slot `slot` of every entry.
template <int N>
Tensor derivatives_of(const BasicTensor<Dual<N>>& t, int slot) {
  Tensor out(t.rank());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = t[k].v[slot];
  return out;
}

template <int N>
Dual<N> make_dual(double value, const double* derivatives) {
  Dual<N> d(value);
  for (int k = 0; k < N; ++k) d.v[k] = derivatives[k];
  return d;
}

}  // namespace micromorph
