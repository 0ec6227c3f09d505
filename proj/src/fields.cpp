#include "micromorph/fields.hpp"

#include <algorithm>
#include <cmath>

namespace micromorph {
namespace {

constexpr int kComponents = 3 + 9 + 3 + 9;
constexpr int kPerComponent = 10;  // value, 3 first, 6 second derivatives
constexpr int kHessianSlot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Jet make_jet(int rank, const double* out) {
  Jet j{Tensor(rank), Tensor(rank + 1), Tensor(rank + 2)};
  for (std::size_t c = 0; c < j.value.size(); ++c) {
    const double* p = out + c * kPerComponent;
    j.value[c] = p[0];
    for (int i = 0; i < kDim; ++i) {
      j.gradient[c * kDim + i] = p[1 + i];
      for (int k = 0; k < kDim; ++k) j.hessian[(c * kDim + i) * kDim + k] = p[4 + kHessianSlot[i][k]];
    }
  }
  return j;
}

std::vector<Point> sample_grid(const Region& region) {
  Point lo, hi;
  if (const auto* box = std::get_if<Box>(&region)) {
    lo = box->lo;
    hi = box->hi;
  } else {
    const auto& ball = std::get<Ball>(region);
    for (int i = 0; i < kDim; ++i) {
      lo[i] = ball.center[i] - ball.radius;
      hi[i] = ball.center[i] + ball.radius;
    }
  }
  std::vector<Point> pts;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        const Point p{lo[0] + (hi[0] - lo[0]) * a / 4.0, lo[1] + (hi[1] - lo[1]) * b / 4.0,
                      lo[2] + (hi[2] - lo[2]) * c / 4.0};
        if (contains(region, p)) pts.push_back(p);
      }
    }
  }
  return pts;
}

}  // namespace

bool contains(const Region& region, const Point& x, double slack) {
  if (const auto* box = std::get_if<Box>(&region)) {
    for (int i = 0; i < kDim; ++i) {
      if (x[i] < box->lo[i] - slack || x[i] > box->hi[i] + slack) return false;
    }
    return true;
  }
  const auto& ball = std::get<Ball>(region);
  return distance(x, ball.center) <= ball.radius + slack;
}

bool region_inside(const Region& inner, const Region& outer) {
  constexpr double slack = 1e-12;
  if (const auto* box = std::get_if<Box>(&inner)) {
    for (int c = 0; c < 8; ++c) {
      const Point corner{(c & 1) ? box->hi[0] : box->lo[0], (c & 2) ? box->hi[1] : box->lo[1],
                         (c & 4) ? box->hi[2] : box->lo[2]};
      if (!contains(outer, corner, slack)) return false;
    }
    return true;
  }
  const auto& ball = std::get<Ball>(inner);
  if (const auto* obox = std::get_if<Box>(&outer)) {
    for (int i = 0; i < kDim; ++i) {
      if (ball.center[i] - ball.radius < obox->lo[i] - slack || ball.center[i] + ball.radius > obox->hi[i] + slack) {
        return false;
      }
    }
    return true;
  }
  const auto& oball = std::get<Ball>(outer);
  return distance(ball.center, oball.center) + ball.radius <= oball.radius + slack;
}

FieldSet::FieldSet(Vector u, Matrix phi, Vector force, Matrix couple, Region domain)
    : u_(std::move(u)), phi_(std::move(phi)), force_(std::move(force)), couple_(std::move(couple)),
      domain_(std::move(domain)) {
  if (const auto* box = std::get_if<Box>(&domain_)) {
    for (int i = 0; i < kDim; ++i) {
      if (!(box->lo[i] < box->hi[i])) throw DomainError("field domain box must have lo < hi on every axis");
    }
  } else if (!(std::get<Ball>(domain_).radius > 0.0)) {
    throw DomainError("field domain ball must have a positive radius");
  }

  std::vector<Expression> components;
  components.insert(components.end(), u_.begin(), u_.end());
  components.insert(components.end(), phi_.begin(), phi_.end());
  components.insert(components.end(), force_.begin(), force_.end());
  components.insert(components.end(), couple_.begin(), couple_.end());

  Differentiator d;
  std::vector<Expression> roots;
  roots.reserve(kComponents * kPerComponent);
  for (const auto& e : components) {
    roots.push_back(e);
    std::array<Expression, kDim> first;
    for (int i = 0; i < kDim; ++i) first[i] = d(e, i);
    roots.insert(roots.end(), first.begin(), first.end());
    for (int i = 0; i < kDim; ++i) {
      for (int k = i; k < kDim; ++k) roots.push_back(d(first[i], k));
    }
  }
  program_ = Program(roots);

  for (const Point& p : sample_grid(domain_)) {
    for (double v : program_.evaluate(p)) {
      if (!std::isfinite(v)) throw DomainError("field expressions are not finite everywhere on the domain");
    }
  }
}

JetBundle FieldSet::evaluate_jet(const Point& x) const {
  if (!contains(domain_, x)) throw DomainError("point lies outside the field domain");
  return evaluate_jet_unchecked(x);
}

JetBundle FieldSet::evaluate_jet_unchecked(const Point& x) const {
  const std::vector<double> out = program_.evaluate(x);
  const double* p = out.data();
  JetBundle b;
  b.u = make_jet(1, p);
  b.phi = make_jet(2, p + 3 * kPerComponent);
  b.force = make_jet(1, p + 12 * kPerComponent);
  b.couple = make_jet(2, p + 15 * kPerComponent);
  return b;
}

FieldArgs<double> field_args(const JetBundle& jets, const Point& x) {
  FieldArgs<double> a;
  a.x = x;
  a.u = jets.u.value;
  a.phi = jets.phi.value;
  a.grad_u = jets.u.gradient;
  a.grad_phi = jets.phi.gradient;
  a.force = jets.force.value;
  a.couple = jets.couple.value;
  return a;
}

FieldArgs<Dual3> seeded_field_args(const JetBundle& jets, const Point& x) {
  FieldArgs<Dual3> a;
  for (int i = 0; i < kDim; ++i) {
    a.x[i] = Dual3(x[i], i);
  }
  // Entry k of `value` gets derivatives from entries k*3 .. k*3+2 of `derivative`.
  auto seed = [](const Tensor& value, const Tensor& derivative, BasicTensor<Dual3>& out) {
    out = BasicTensor<Dual3>(value.rank());
    for (std::size_t k = 0; k < value.size(); ++k) {
      out[k] = make_dual<kDim>(value[k], &derivative[k * kDim]);
    }
  };
  seed(jets.u.value, jets.u.gradient, a.u);
  seed(jets.u.gradient, jets.u.hessian, a.grad_u);
  seed(jets.phi.value, jets.phi.gradient, a.phi);
  seed(jets.phi.gradient, jets.phi.hessian, a.grad_phi);
  seed(jets.force.value, jets.force.gradient, a.force);
  seed(jets.couple.value, jets.couple.gradient, a.couple);
  return a;
}

Tensor total_derivative_fd(const OpaqueFunction& g, const FieldSet& fs, const Point& x, double h) {
  if (!(h > 0.0)) throw NumericError("finite-difference step must be positive");
  Tensor out;
  for (int i = 0; i < kDim; ++i) {
    Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    if (xp[i] == x[i] || xm[i] == x[i]) throw NumericError("finite-difference step underflows at this point");
    const Tensor gp = g(field_args(fs.evaluate_jet_unchecked(xp), xp));
    const Tensor gm = g(field_args(fs.evaluate_jet_unchecked(xm), xm));
    if (i == 0) out = Tensor(gp.rank() + 1);
    const double inv = 1.0 / (xp[i] - xm[i]);
    for (std::size_t k = 0; k < gp.size(); ++k) out[k * kDim + i] = (gp[k] - gm[k]) * inv;
  }
  return out;
}

Tensor fd_divergence(const PointFunction& field, const Point& x, double h) {
  if (!(h > 0.0)) throw NumericError("finite-difference step must be positive");
  Tensor out;
  for (int i = 0; i < kDim; ++i) {
    Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Tensor tp = field(xp);
    const Tensor tm = field(xm);
    if (tp.rank() < 1) throw ShapeError("fd_divergence needs a field of rank >= 1");
    if (i == 0) out = Tensor(tp.rank() - 1);
    const double inv = 1.0 / (xp[i] - xm[i]);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += (tp[k * kDim + i] - tm[k * kDim + i]) * inv;
  }
  return out;
}

}  // namespace micromorph
