#pragma once

// Random data and brute-force oracles shared by the unit tests and the
// acceptance binary. Nothing here calls the library routine it is used to
// check.

#include <cmath>
#include <numbers>
#include <random>

#include "micromorph/currents.hpp"
#include "micromorph/scenario.hpp"

namespace testing_support {

using namespace micromorph;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

 private:
  std::mt19937_64 engine_;
};

inline Tensor random_tensor(int rank, Rng& rng, double amplitude = 1.0) {
  Tensor t(rank);
  for (double& v : t.entries()) v = amplitude * rng.uniform();
  return t;
}

inline Point random_point(Rng& rng, double half = 1.0) {
  return {rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half)};
}

inline Tensor random_rotation(Rng& rng) {
  Point axis{0, 0, 0};
  double n = 0.0;
  while (n < 1e-3) {
    axis = random_point(rng);
    n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  }
  for (double& a : axis) a /= n;
  return rotation_about_axis(axis, rng.uniform(-std::numbers::pi, std::numbers::pi));
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor c(2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) c(i, j) += a(i, k) * b(k, j);
    }
  }
  return c;
}

/// sum of c * x1^a x2^b x3^c over all monomials of total degree <= degree.
inline Expression random_polynomial(Rng& rng, int degree, double amplitude = 0.5) {
  const Expression x[3] = {Expression::variable(0), Expression::variable(1), Expression::variable(2)};
  Expression sum;
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      for (int c = 0; a + b + c <= degree; ++c) {
        Expression mono(amplitude * rng.uniform());
        if (a) mono = mono * pow(x[0], a);
        if (b) mono = mono * pow(x[1], b);
        if (c) mono = mono * pow(x[2], c);
        sum = sum + mono;
      }
    }
  }
  return sum;
}

/// A polynomial plus a low-frequency trigonometric or exponential term.
inline Expression random_smooth(Rng& rng, double amplitude = 0.5) {
  const Expression x[3] = {Expression::variable(0), Expression::variable(1), Expression::variable(2)};
  const int axis = rng.integer(0, 2);
  const Expression arg = Expression(rng.uniform(0.3, 0.9)) * x[axis] + Expression(rng.uniform());
  Expression f;
  switch (rng.integer(0, 2)) {
    case 0: f = sin(arg); break;
    case 1: f = cos(arg); break;
    default: f = exp(Expression(0.5) * arg); break;
  }
  return random_polynomial(rng, 2, amplitude) + Expression(amplitude * rng.uniform()) * f;
}

inline FieldSet::Vector random_vector(Rng& rng, bool smooth) {
  FieldSet::Vector v;
  for (auto& e : v) e = smooth ? random_smooth(rng) : random_polynomial(rng, 3);
  return v;
}

inline FieldSet::Matrix random_matrix(Rng& rng, bool smooth) {
  FieldSet::Matrix v;
  for (auto& e : v) e = smooth ? random_smooth(rng) : random_polynomial(rng, 3);
  return v;
}

inline Box unit_domain() { return Box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}}; }

/// Random u, phi and random (not manufactured) sources.
inline FieldSet random_fields(Rng& rng, bool smooth = true, bool sources = true) {
  FieldSet::Vector f;
  FieldSet::Matrix l;
  if (sources) {
    f = random_vector(rng, smooth);
    l = random_matrix(rng, smooth);
  }
  return FieldSet(random_vector(rng, smooth), random_matrix(rng, smooth), f, l, unit_domain());
}

inline IsotropicSpec random_isotropic_spec(Rng& rng) {
  IsotropicSpec spec;
  for (double& c : spec.A) c = rng.uniform();
  for (double& c : spec.B) c = rng.uniform();
  for (double& c : spec.C) c = rng.uniform();
  for (double& c : spec.E) c = rng.uniform();
  return spec;
}

/// Anisotropic material with every tensor nonzero; inhomogeneous when asked.
inline MaterialModel random_material(Rng& rng, bool inhomogeneous) {
  const Expression x[3] = {Expression::variable(0), Expression::variable(1), Expression::variable(2)};
  auto field = [&](int rank) {
    std::vector<TensorTerm> terms{{Expression(1.0), random_tensor(rank, rng, 0.5)}};
    if (inhomogeneous) {
      terms.push_back({Expression(0.3) * sin(Expression(0.7) * x[rng.integer(0, 2)]) + Expression(0.2) * x[0] * x[1],
                       random_tensor(rank, rng, 0.5)});
    }
    return TensorField(rank, std::move(terms));
  };
  return make_anisotropic(field(4), field(4), field(6), field(4), field(5), field(5));
}

// ---------------------------------------------------------------------------
// Naive index-loop oracles.

struct NaiveStress {
  Tensor t{2}, s{2}, m{3};
};

inline NaiveStress naive_stresses(const MaterialPoint<double>& mp, const Tensor& gamma, const Tensor& e,
                                  const Tensor& kappa) {
  NaiveStress out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double t = 0.0, s = 0.0;
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          t += mp.A(i, j, k, l) * gamma(k, l) + mp.E(i, j, k, l) * e(k, l);
          s += mp.E(k, l, i, j) * gamma(k, l) + mp.B(i, j, k, l) * e(k, l);
          for (int m = 0; m < 3; ++m) {
            t += mp.F(i, j, k, l, m) * kappa(k, l, m);
            s += mp.G(i, j, k, l, m) * kappa(k, l, m);
          }
        }
      }
      out.t(i, j) = t;
      out.s(i, j) = s;
      for (int k = 0; k < 3; ++k) {
        double m = 0.0;
        for (int l = 0; l < 3; ++l) {
          for (int mm = 0; mm < 3; ++mm) {
            m += mp.F(l, mm, i, j, k) * gamma(l, mm) + mp.G(l, mm, i, j, k) * e(l, mm);
            for (int n = 0; n < 3; ++n) m += mp.C(i, j, k, l, mm, n) * kappa(l, mm, n);
          }
        }
        out.m(i, j, k) = m;
      }
    }
  }
  return out;
}

/// Relative difference |a-b|_max / max(1, |a|_max, |b|_max).
inline double rel_diff(const Tensor& a, const Tensor& b) {
  return max_abs_difference(a, b) / std::max({1.0, max_abs(a), max_abs(b)});
}

}  // namespace testing_support
