#include "micromorph/integrals.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>

namespace micromorph {
namespace {

std::atomic<int> g_threads{0};

void check_rule(const QuadratureRule& rule, const Region* domain);

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int threads = std::min<std::size_t>(evaluation_threads(), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < n; k += threads) fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

void check_rule(const QuadratureRule& rule, const Region* domain) {
  if (rule.surface_order < 2 || rule.volume_order < 2) throw ShapeError("quadrature orders must be at least 2");
  if (domain && !region_inside(rule.geometry, *domain)) {
    throw DomainError("integration geometry " + describe(rule.geometry) + " is not inside the field domain " +
                      describe(*domain));
  }
}

// Product rule on the unit sphere: Gauss in cos(theta), trapezoid in azimuth.
std::vector<QuadraturePoint> unit_sphere(int order) {
  std::vector<double> z, wz;
  gauss_legendre(order, z, wz);
  const int n_az = 2 * order;
  const double w_az = 2.0 * std::numbers::pi / n_az;
  std::vector<QuadraturePoint> pts;
  pts.reserve(static_cast<std::size_t>(order) * n_az);
  for (int a = 0; a < order; ++a) {
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - z[a] * z[a]));
    for (int b = 0; b < n_az; ++b) {
      const double az = w_az * b;
      const Point n{sin_t * std::cos(az), sin_t * std::sin(az), z[a]};
      pts.push_back({n, n, wz[a] * w_az});
    }
  }
  return pts;
}

Tensor contract_normal(const Tensor& flux, const Point& n) {
  Tensor out(flux.rank() - 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (int i = 0; i < kDim; ++i) out[k] += flux[k * kDim + i] * n[i];
  }
  return out;
}

Tensor accumulate(const std::vector<Tensor>& values) {
  Tensor sum(values.empty() ? 0 : values.front().rank());
  for (const Tensor& v : values) sum += v;
  return sum;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ShapeError("Gauss-Legendre order must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

void gauss_radial(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ShapeError("radial Gauss order must be positive");
  // Golub-Welsch for the Jacobi weight (1+t)^2 on [-1, 1], then r = (1+t)/2.
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) diag[k] = 4.0 / ((2.0 * k + 2.0) * (2.0 * k + 4.0));
  for (int k = 1; k < n; ++k) {
    const double kk = k;
    sub[k - 1] = std::sqrt(4.0 * kk * kk * (kk + 2.0) * (kk + 2.0) /
                           ((2.0 * kk + 2.0) * (2.0 * kk + 2.0) * (2.0 * kk + 3.0) * (2.0 * kk + 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  nodes.resize(n);
  weights.resize(n);
  const double mu0 = 8.0 / 3.0;
  for (int k = 0; k < n; ++k) {
    const double v = solver.eigenvectors()(0, k);
    nodes[k] = 0.5 * (1.0 + solver.eigenvalues()[k]);
    weights[k] = mu0 * v * v / 8.0;
  }
}

std::vector<QuadraturePoint> surface_points(const QuadratureRule& rule) {
  check_rule(rule, nullptr);
  const int n = rule.surface_order;
  if (const auto* ball = std::get_if<Ball>(&rule.geometry)) {
    auto pts = unit_sphere(n);
    const double r2 = ball->radius * ball->radius;
    for (auto& p : pts) {
      for (int i = 0; i < kDim; ++i) p.x[i] = ball->center[i] + ball->radius * p.normal[i];
      p.weight *= r2;
    }
    return pts;
  }
  const auto& box = std::get<Box>(rule.geometry);
  std::vector<double> z, w;
  gauss_legendre(n, z, w);
  std::vector<QuadraturePoint> pts;
  for (int axis = 0; axis < kDim; ++axis) {
    const int a1 = (axis + 1) % kDim;
    const int a2 = (axis + 2) % kDim;
    const double h1 = 0.5 * (box.hi[a1] - box.lo[a1]);
    const double h2 = 0.5 * (box.hi[a2] - box.lo[a2]);
    const double c1 = 0.5 * (box.hi[a1] + box.lo[a1]);
    const double c2 = 0.5 * (box.hi[a2] + box.lo[a2]);
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          QuadraturePoint p;
          p.x[axis] = side == 0 ? box.lo[axis] : box.hi[axis];
          p.x[a1] = c1 + h1 * z[i];
          p.x[a2] = c2 + h2 * z[j];
          p.normal[axis] = side == 0 ? -1.0 : 1.0;
          p.weight = w[i] * w[j] * h1 * h2;
          pts.push_back(p);
        }
      }
    }
  }
  return pts;
}

std::vector<QuadraturePoint> volume_points(const QuadratureRule& rule) {
  check_rule(rule, nullptr);
  const int n = rule.volume_order;
  std::vector<double> z, w;
  gauss_legendre(n, z, w);
  std::vector<QuadraturePoint> pts;
  if (const auto* ball = std::get_if<Ball>(&rule.geometry)) {
    const auto sphere = unit_sphere(n);
    std::vector<double> rn, rw;
    gauss_radial(n, rn, rw);
    const double r3 = ball->radius * ball->radius * ball->radius;
    for (int a = 0; a < n; ++a) {
      const double r = ball->radius * rn[a];
      const double wr = rw[a] * r3;
      for (const auto& s : sphere) {
        QuadraturePoint p;
        for (int i = 0; i < kDim; ++i) p.x[i] = ball->center[i] + r * s.normal[i];
        p.weight = wr * s.weight;
        pts.push_back(p);
      }
    }
    return pts;
  }
  const auto& box = std::get<Box>(rule.geometry);
  Point h, c;
  for (int i = 0; i < kDim; ++i) {
    h[i] = 0.5 * (box.hi[i] - box.lo[i]);
    c[i] = 0.5 * (box.hi[i] + box.lo[i]);
  }
  const double jac = h[0] * h[1] * h[2];
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int d = 0; d < n; ++d) {
        QuadraturePoint p;
        p.x = {c[0] + h[0] * z[a], c[1] + h[1] * z[b], c[2] + h[2] * z[d]};
        p.weight = w[a] * w[b] * w[d] * jac;
        pts.push_back(p);
      }
    }
  }
  return pts;
}

void set_evaluation_threads(int threads) { g_threads = std::max(0, threads); }

int evaluation_threads() {
  const int t = g_threads.load();
  if (t > 0) return t;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Tensor surface_integral(const PointFunction& flux, const QuadratureRule& rule, const Region* domain) {
  check_rule(rule, domain);
  const auto pts = surface_points(rule);
  std::vector<Tensor> contrib(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    const Tensor f = flux(pts[k].x);
    if (f.rank() < 1) throw ShapeError("surface_integral needs a flux of rank >= 1");
    contrib[k] = contract_normal(f, pts[k].normal) * pts[k].weight;
  });
  return accumulate(contrib);
}

Tensor volume_integral(const PointFunction& density, const QuadratureRule& rule, const Region* domain) {
  check_rule(rule, domain);
  const auto pts = volume_points(rule);
  std::vector<Tensor> contrib(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) { contrib[k] = density(pts[k].x) * pts[k].weight; });
  return accumulate(contrib);
}

IntegralPair make_pair_report(Tensor surface, Tensor volume) {
  const double scale = std::max({1.0, max_abs(surface), max_abs(volume)});
  const double diff = max_abs_difference(surface, volume);
  return IntegralPair{std::move(surface), std::move(volume), diff / scale};
}

IntegralPair j_integral(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                        const EvalOptions& opts) {
  const Region& dom = fs.domain();
  Tensor s = surface_integral([&](const Point& x) { return eshelby_stress(sample_point(fs, m, x, opts).state); },
                              rule, &dom);
  Tensor v = volume_integral([&](const Point& x) { return -inhomogeneity_force(sample_point(fs, m, x, opts)); },
                             rule, &dom);
  return make_pair_report(std::move(s), std::move(v));
}

IntegralPair l_integral(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                        const EvalOptions& opts) {
  const Region& dom = fs.domain();
  Tensor s = surface_integral(
      [&](const Point& x) { return angular_momentum(sample_point(fs, m, x, opts).state).total; }, rule, &dom);
  Tensor v = volume_integral([&](const Point& x) { return rotational_source(sample_point(fs, m, x, opts)); },
                             rule, &dom);
  return make_pair_report(std::move(s), std::move(v));
}

IntegralPair m_integral(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                        const ScalingDims& dims, const EvalOptions& opts) {
  const Region& dom = fs.domain();
  Tensor s = surface_integral(
      [&](const Point& x) { return scaling_flux(sample_point(fs, m, x, opts).state, dims); }, rule, &dom);
  Tensor v = volume_integral(
      [&](const Point& x) { return Tensor(0, {scaling_source(sample_point(fs, m, x, opts), dims)}); }, rule, &dom);
  return make_pair_report(std::move(s), std::move(v));
}

IntegralReport compute_integrals(const FieldSet& fs, const MaterialModel& m, const QuadratureRule& rule,
                                 const ScalingDims& dims, const EvalOptions& opts) {
  check_rule(rule, &fs.domain());
  const auto spts = surface_points(rule);
  const auto vpts = volume_points(rule);

  // Per point: J(3), L(3), M(1) [, kappa:m(1)].
  std::vector<std::array<double, 8>> sc(spts.size()), vc(vpts.size());
  parallel_for(spts.size(), [&](std::size_t k) {
    const auto& q = spts[k];
    const PointSample s = sample_point(fs, m, q.x, opts);
    const Tensor J = contract_normal(eshelby_stress(s.state), q.normal);
    const Tensor L = contract_normal(angular_momentum(s.state).total, q.normal);
    const Tensor M = contract_normal(scaling_flux(s.state, dims), q.normal);
    sc[k] = {J[0], J[1], J[2], L[0], L[1], L[2], M[0], 0.0};
    for (double& v : sc[k]) v *= q.weight;
  });
  parallel_for(vpts.size(), [&](std::size_t k) {
    const auto& q = vpts[k];
    const PointSample s = sample_point(fs, m, q.x, opts);
    const Tensor f = inhomogeneity_force(s);
    const Tensor rot = rotational_source(s);
    double km = 0.0;
    for (int c = 0; c < 27; ++c) km += s.state.strain.kappa[c] * s.state.stress.m[c];
    vc[k] = {-f[0], -f[1], -f[2], rot[0], rot[1], rot[2], scaling_source(s, dims), -km};
    for (double& v : vc[k]) v *= q.weight;
  });

  std::array<double, 8> ssum{}, vsum{};
  for (const auto& c : sc) {
    for (int i = 0; i < 8; ++i) ssum[i] += c[i];
  }
  for (const auto& c : vc) {
    for (int i = 0; i < 8; ++i) vsum[i] += c[i];
  }

  IntegralReport r;
  r.J = make_pair_report(Tensor(1, {ssum[0], ssum[1], ssum[2]}), Tensor(1, {vsum[0], vsum[1], vsum[2]}));
  r.L = make_pair_report(Tensor(1, {ssum[3], ssum[4], ssum[5]}), Tensor(1, {vsum[3], vsum[4], vsum[5]}));
  r.M = make_pair_report(Tensor(0, {ssum[6]}), Tensor(0, {vsum[6]}));
  r.kappa_m_volume = vsum[7];
  r.surface_order = rule.surface_order;
  r.volume_order = rule.volume_order;
  r.surface_point_count = spts.size();
  r.volume_point_count = vpts.size();
  r.geometry = describe(rule.geometry);
  return r;
}

std::string describe(const Region& region) {
  char buf[200];
  if (const auto* box = std::get_if<Box>(&region)) {
    std::snprintf(buf, sizeof buf, "box[(%g, %g, %g), (%g, %g, %g)]", box->lo[0], box->lo[1], box->lo[2], box->hi[0],
                  box->hi[1], box->hi[2]);
  } else {
    const auto& b = std::get<Ball>(region);
    std::snprintf(buf, sizeof buf, "ball[(%g, %g, %g), r=%g]", b.center[0], b.center[1], b.center[2], b.radius);
  }
  return buf;
}

}  // namespace micromorph
