#pragma once

#include <complex>
#include <span>
#include <vector>

#include "gtrans/spectral.hpp"
#include "gtrans/vec2.hpp"

namespace gtrans {

inline constexpr int kDefaultNTheta = 256;

// Relative tolerances, all scaled by max(h).
struct GeometryTolerances {
  double convex = 1e-8;
  double contain = 1e-10;
  double floor_det = 1e-6;
};

// Support-function samples h(θ_j), θ_j = 2πj/n, of a compact convex planar set
// with the origin in its interior. Immutable; derivatives are cached.
class ConvexBody {
 public:
  ConvexBody(std::vector<double> h, DiffRule rule = DiffRule::spectral,
             GeometryTolerances tol = {});

  int n_theta() const { return static_cast<int>(h_.size()); }
  double dtheta() const { return kTwoPi / n_theta(); }
  double theta(int j) const { return dtheta() * j; }
  DiffRule rule() const { return rule_; }
  const GeometryTolerances& tolerances() const { return tol_; }

  std::span<const double> h() const { return h_; }
  std::span<const double> h_theta() const { return d1_; }
  // h + h_θθ, the radius of curvature as a function of the normal.
  std::span<const double> radius() const { return radius_; }
  double h(int j) const { return h_[wrap(j)]; }
  double max_h() const { return max_h_; }

  double tol_convex() const { return tol_.convex * max_h_; }
  double tol_contain() const { return tol_.contain * max_h_; }
  double floor_det() const { return tol_.floor_det * max_h_; }

  // Trigonometric interpolant of h, valid for smooth (spectral) bodies.
  std::span<const std::complex<double>> coefficients() const { return coeffs_; }

  size_t wrap(int j) const {
    const int n = n_theta();
    return static_cast<size_t>(((j % n) + n) % n);
  }

 private:
  std::vector<double> h_;
  std::vector<double> d1_;
  std::vector<double> radius_;
  std::vector<std::complex<double>> coeffs_;
  DiffRule rule_;
  GeometryTolerances tol_;
  double max_h_ = 0.0;
};

ConvexBody body_from_polygon(std::span<const Vec2> vertices, int n_theta = kDefaultNTheta);
ConvexBody body_from_ellipse(double a, double b, int n_theta = kDefaultNTheta);
ConvexBody body_from_disk(double radius, int n_theta = kDefaultNTheta);
// Minkowski sum of the polygon with a disk of radius `rounding`, followed by a
// rotational average with a Gaussian of angular width `mollify` so that the
// boundary is strictly convex and C^∞.
ConvexBody body_smoothed_polygon(std::span<const Vec2> vertices, double rounding,
                                 double mollify = 0.2, int n_theta = kDefaultNTheta);
ConvexBody scaled(const ConvexBody& body, double factor);

// h_j n(θ_j) + h_θ(θ_j) v(θ_j): the boundary point with outer normal n(θ_j).
Vec2 boundary_point(const ConvexBody& body, int j);
// Same, at an arbitrary normal angle (spectral bodies only).
Vec2 boundary_point_at(const ConvexBody& body, double theta);

// K = 1 / (h + h_θθ); throws degenerate_curvature below floor_det.
double curvature_from_support(const ConvexBody& body, int j);

bool contains(const ConvexBody& body, Vec2 x);
// max_j (<x, n_j> - h_j); nonpositive iff x is in the discrete body.
double support_gap(const ConvexBody& body, Vec2 x);

// Distance from the origin to the boundary along direction `omega`.
double radial_extent(const ConvexBody& body, double omega);

double area(const ConvexBody& body);
double perimeter(const ConvexBody& body);

// True if the discrete convexity invariant holds everywhere.
bool is_discretely_convex(std::span<const double> h, double tol);

struct UniformGrid {
  double lo = 0.0;
  double hi = 1.0;
  int m = 2;

  double step() const { return (hi - lo) / (m - 1); }
  double at(int i) const { return lo + step() * i; }
};

// Samples of a convex function of one variable on a uniform grid.
struct GraphFunction {
  UniformGrid grid;
  std::vector<double> w;

  GraphFunction(UniformGrid g, std::vector<double> values);
};

// Exact discrete conjugate max_i (p z_i - w_i) on `out` (default: the slope range).
GraphFunction legendre(const GraphFunction& w);
GraphFunction legendre(const GraphFunction& w, UniformGrid out);

// Support value of the epigraph of w at lower-half normal angles φ ∈ (π, 2π):
// H(n) = sqrt(1 - n_x²) · W*(n_x / sqrt(1 - n_x²)).
std::vector<double> support_from_graph(const GraphFunction& w, std::span<const double> normal_angles,
                                       double margin = 0.05);

}  // namespace gtrans
