#include "gtrans/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gtrans/error.hpp"

namespace gtrans {
namespace {

double wrap_to_pi(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - kPi;
}

std::vector<double> polygon_support(std::span<const Vec2> vertices, int n) {
  std::vector<double> h(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Vec2 nj = unit_normal(kTwoPi * j / n);
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : vertices) best = std::max(best, dot(v, nj));
    h[static_cast<size_t>(j)] = best;
  }
  return h;
}

void check_polygon(std::span<const Vec2> vertices) {
  if (vertices.size() < 3) fail(ErrorKind::invalid_argument, "polygon needs at least 3 vertices");
}

// Vertices of the intersection of the support half-planes at consecutive grid normals.
std::vector<Vec2> discrete_polygon(const ConvexBody& body) {
  const int n = body.n_theta();
  std::vector<Vec2> pts(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Vec2 a = unit_normal(body.theta(j));
    const Vec2 b = unit_normal(body.theta(j + 1));
    const double ha = body.h(j);
    const double hb = body.h(j + 1);
    const double det = cross(a, b);
    pts[static_cast<size_t>(j)] = {(ha * b.y - hb * a.y) / det, (a.x * hb - b.x * ha) / det};
  }
  return pts;
}

}  // namespace

ConvexBody::ConvexBody(std::vector<double> h, DiffRule rule, GeometryTolerances tol)
    : h_(std::move(h)), rule_(rule), tol_(tol) {
  const int n = static_cast<int>(h_.size());
  if (!is_power_of_two(n) || n < 8) {
    fail(ErrorKind::invalid_argument, "n_theta must be a power of two >= 8, got " + std::to_string(n));
  }
  for (double v : h_) {
    if (!(v > 0.0)) fail(ErrorKind::origin_not_interior, "support value <= 0: origin is not interior");
  }
  max_h_ = *std::max_element(h_.begin(), h_.end());
  if (!is_discretely_convex(h_, tol_.convex * max_h_)) {
    fail(ErrorKind::not_convex, "support samples violate discrete convexity");
  }
  d1_.resize(h_.size());
  std::vector<double> d2(h_.size());
  periodic_derivatives(h_, d1_, d2, rule_);
  radius_.resize(h_.size());
  for (size_t j = 0; j < h_.size(); ++j) radius_[j] = h_[j] + d2[j];
  coeffs_ = fourier_coefficients(h_);
}

bool is_discretely_convex(std::span<const double> h, double tol) {
  const int n = static_cast<int>(h.size());
  const double dt = kTwoPi / n;
  for (int j = 0; j < n; ++j) {
    const double hm = h[static_cast<size_t>((j + n - 1) % n)];
    const double hp = h[static_cast<size_t>((j + 1) % n)];
    const double h0 = h[static_cast<size_t>(j)];
    if (hm - 2.0 * h0 + hp + dt * dt * h0 < -tol) return false;
  }
  return true;
}

ConvexBody body_from_polygon(std::span<const Vec2> vertices, int n_theta) {
  check_polygon(vertices);
  return ConvexBody(polygon_support(vertices, n_theta), DiffRule::central);
}

ConvexBody body_from_ellipse(double a, double b, int n_theta) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorKind::invalid_argument, "ellipse semi-axes must be positive");
  std::vector<double> h(static_cast<size_t>(n_theta));
  for (int j = 0; j < n_theta; ++j) {
    const double t = kTwoPi * j / n_theta;
    const double c = std::cos(t);
    const double s = std::sin(t);
    h[static_cast<size_t>(j)] = std::sqrt(a * a * c * c + b * b * s * s);
  }
  return ConvexBody(std::move(h));
}

ConvexBody body_from_disk(double radius, int n_theta) {
  if (!(radius > 0.0)) fail(ErrorKind::invalid_argument, "disk radius must be positive");
  return ConvexBody(std::vector<double>(static_cast<size_t>(n_theta), radius));
}

ConvexBody body_smoothed_polygon(std::span<const Vec2> vertices, double rounding, double mollify,
                                 int n_theta) {
  check_polygon(vertices);
  if (!(rounding > 0.0) || !(mollify > 0.0)) {
    fail(ErrorKind::invalid_argument, "rounding and mollify widths must be positive");
  }
  constexpr int kOversample = 16;
  auto fine = polygon_support(vertices, n_theta * kOversample);
  for (double v : fine) {
    if (!(v > 0.0)) fail(ErrorKind::origin_not_interior, "support value <= 0: origin is not interior");
  }
  for (double& v : fine) v += rounding;
  const auto smooth = gaussian_smooth(fine, mollify);
  std::vector<double> h(static_cast<size_t>(n_theta));
  for (int j = 0; j < n_theta; ++j) h[static_cast<size_t>(j)] = smooth[static_cast<size_t>(j * kOversample)];
  return ConvexBody(std::move(h));
}

ConvexBody scaled(const ConvexBody& body, double factor) {
  std::vector<double> h(body.h().begin(), body.h().end());
  for (double& v : h) v *= factor;
  return ConvexBody(std::move(h), body.rule(), body.tolerances());
}

Vec2 boundary_point(const ConvexBody& body, int j) {
  const size_t k = body.wrap(j);
  const double t = body.theta(static_cast<int>(k));
  return body.h()[k] * unit_normal(t) + body.h_theta()[k] * unit_tangent(t);
}

Vec2 boundary_point_at(const ConvexBody& body, double theta) {
  const TrigValue v = eval_trig(body.coefficients(), body.n_theta(), theta);
  return v.f * unit_normal(theta) + v.df * unit_tangent(theta);
}

double curvature_from_support(const ConvexBody& body, int j) {
  const double w = body.radius()[body.wrap(j)];
  if (w <= body.floor_det()) {
    fail(ErrorKind::degenerate_curvature,
         "h + h_thetatheta = " + std::to_string(w) + " at normal index " + std::to_string(j));
  }
  return 1.0 / w;
}

double support_gap(const ConvexBody& body, Vec2 x) {
  double gap = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < body.n_theta(); ++j) {
    gap = std::max(gap, dot(x, unit_normal(body.theta(j))) - body.h(j));
  }
  return gap;
}

bool contains(const ConvexBody& body, Vec2 x) {
  const double tol = body.tol_contain();
  for (int j = 0; j < body.n_theta(); ++j) {
    if (dot(x, unit_normal(body.theta(j))) > body.h(j) + tol) return false;
  }
  return true;
}

double radial_extent(const ConvexBody& body, double omega) {
  const int n = body.n_theta();
  const Vec2 dir = unit_normal(omega);
  if (body.rule() == DiffRule::central) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      const double c = dot(dir, unit_normal(body.theta(j)));
      if (c > 1e-12) best = std::min(best, body.h(j) / c);
    }
    return best;
  }
  // The polar angle of the boundary point is monotone in its normal angle.
  auto offset = [&](double t) { return wrap_to_pi(polar_angle(boundary_point_at(body, t)) - omega); };
  int bracket = -1;
  double prev = wrap_to_pi(polar_angle(boundary_point(body, 0)) - omega);
  for (int j = 1; j <= n; ++j) {
    const double cur = wrap_to_pi(polar_angle(boundary_point(body, j)) - omega);
    if (prev <= 0.0 && cur >= 0.0 && cur - prev < kPi) {
      bracket = j - 1;
      break;
    }
    prev = cur;
  }
  if (bracket < 0) fail(ErrorKind::geometry, "radial extent: boundary does not wind around origin");
  double lo = body.theta(bracket);
  double hi = lo + body.dtheta();
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (offset(mid) < 0.0) lo = mid; else hi = mid;
  }
  return norm(boundary_point_at(body, 0.5 * (lo + hi)));
}

double area(const ConvexBody& body) {
  if (body.rule() == DiffRule::central) {
    const auto pts = discrete_polygon(body);
    double a = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return 0.5 * a;
  }
  double s = 0.0;
  for (int j = 0; j < body.n_theta(); ++j) {
    const double h = body.h()[static_cast<size_t>(j)];
    const double d = body.h_theta()[static_cast<size_t>(j)];
    s += h * h - d * d;
  }
  return 0.5 * s * body.dtheta();
}

double perimeter(const ConvexBody& body) {
  if (body.rule() == DiffRule::central) {
    const auto pts = discrete_polygon(body);
    double p = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) p += norm(pts[(i + 1) % pts.size()] - pts[i]);
    return p;
  }
  // Cauchy's formula: the perimeter is the integral of h over the circle.
  double s = 0.0;
  for (double v : body.h()) s += v;
  return s * body.dtheta();
}

GraphFunction::GraphFunction(UniformGrid g, std::vector<double> values)
    : grid(g), w(std::move(values)) {
  if (grid.m < 2 || static_cast<int>(w.size()) != grid.m || !(grid.hi > grid.lo)) {
    fail(ErrorKind::invalid_argument, "graph function needs m >= 2 samples on an increasing grid");
  }
}

namespace {

// Indices of the lower convex hull of (z_i, w_i).
std::vector<int> lower_hull(const GraphFunction& f) {
  std::vector<int> hull;
  for (int i = 0; i < f.grid.m; ++i) {
    const Vec2 p{f.grid.at(i), f.w[static_cast<size_t>(i)]};
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      const Vec2 pa{f.grid.at(a), f.w[static_cast<size_t>(a)]};
      const Vec2 pb{f.grid.at(b), f.w[static_cast<size_t>(b)]};
      if (cross(pb - pa, p - pa) <= 0.0) hull.pop_back(); else break;
    }
    hull.push_back(i);
  }
  return hull;
}

}  // namespace

GraphFunction legendre(const GraphFunction& w) {
  const double dz = w.grid.step();
  const double lo = (w.w[1] - w.w[0]) / dz;
  const double hi = (w.w.back() - w.w[w.w.size() - 2]) / dz;
  if (!(hi > lo)) fail(ErrorKind::invalid_argument, "legendre: slope range is degenerate");
  return legendre(w, UniformGrid{lo, hi, w.grid.m});
}

GraphFunction legendre(const GraphFunction& w, UniformGrid out) {
  const auto hull = lower_hull(w);
  std::vector<double> values(static_cast<size_t>(out.m));
  size_t k = 0;
  for (int i = 0; i < out.m; ++i) {
    const double p = out.at(i);
    auto value = [&](size_t idx) {
      const int zi = hull[idx];
      return p * w.grid.at(zi) - w.w[static_cast<size_t>(zi)];
    };
    // Argmax over hull vertices is nondecreasing in p.
    while (k + 1 < hull.size() && value(k + 1) >= value(k)) ++k;
    values[static_cast<size_t>(i)] = value(k);
  }
  return GraphFunction(out, std::move(values));
}

std::vector<double> support_from_graph(const GraphFunction& w, std::span<const double> normal_angles,
                                       double margin) {
  std::vector<double> out;
  out.reserve(normal_angles.size());
  for (double phi : normal_angles) {
    const Vec2 n = unit_normal(phi);
    if (!(n.y < 0.0) || std::abs(n.x) > 1.0 - margin) {
      fail(ErrorKind::chart_out_of_range, "normal angle " + std::to_string(phi) + " is outside the graph chart");
    }
    const double p = n.x / (-n.y);
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < w.grid.m; ++i) {
      const double v = p * w.grid.at(i) - w.w[static_cast<size_t>(i)];
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best == 0 || best == w.grid.m - 1) {
      fail(ErrorKind::chart_out_of_range, "slope " + std::to_string(p) + " is outside the graph's slope range");
    }
    out.push_back(-n.y * best_val);
  }
  return out;
}

}  // namespace gtrans
