#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gtrans/geometry.hpp"

namespace gtrans {

struct Uniform {};
struct RadialPower {
  double alpha = 0.0;
};
struct AngularCosine {
  double amplitude = 0.0;
  int frequency = 1;
};
struct GaussianTrunc {
  double sigma = 1.0;
};

using DensityKind = std::variant<Uniform, RadialPower, AngularCosine, GaussianTrunc>;

// Support of a density: a ball B_R centered at the origin or a convex body.
struct Domain {
  static Domain ball(double radius);
  static Domain of_body(ConvexBody body);

  bool is_ball() const { return !body.has_value(); }
  double radius = 0.0;  // ball radius; circumradius bound for bodies
  std::optional<ConvexBody> body;
};

struct QuadratureOptions {
  int radial_nodes = 64;  // Gauss-Legendre
  int angular_nodes = 0;  // trapezoid; 0 means the body's n_theta (256 for balls)
  double tol = 1e-8;
};

// A probability density from the catalog. Construct through normalize().
class DensityField {
 public:
  DensityField(Domain domain, DensityKind kind, int dim = 2);

  const Domain& domain() const { return domain_; }
  const DensityKind& kind() const { return kind_; }
  int dim() const { return dim_; }
  double Z() const { return z_; }
  bool normalized() const { return z_ > 0.0; }
  bool is_radial() const;
  std::string kind_name() const;

  // Unnormalized shape g(x); density = Z·g.
  double shape(Vec2 x) const;
  // Gradient of the normalized density.
  Vec2 gradient(Vec2 x) const;
  // Shape as a function of radius for radially symmetric kinds.
  double radial_shape(double s) const;

  bool domain_contains(Vec2 x) const;
  // Distance from the origin to the domain boundary along direction omega.
  double extent(double omega) const;

  friend DensityField normalize(const DensityField& field, const QuadratureOptions& opts);

 private:
  Domain domain_;
  DensityKind kind_;
  int dim_;
  double z_ = 0.0;
};

DensityField normalize(const DensityField& field, const QuadratureOptions& opts = {});

// Pointwise density; out_of_domain beyond tol_contain.
double eval(const DensityField& field, Vec2 x);
// Same formula without the domain check.
double eval_unchecked(const DensityField& field, Vec2 x);
// Density at radius s for radial kinds in any dimension.
double eval_radial(const DensityField& field, double s);

// Mass of {|x| <= s} for radially symmetric fields on balls (or disk bodies).
double radial_cdf(const DensityField& field, double s);
// Mass of the annular sector {a <= |x| <= b, θ0 <= arg x <= θ1} for fields on a ball.
double sector_mass(const DensityField& field, double a, double b, double theta0, double theta1);
// Total mass by quadrature (1 after normalization).
double total_mass(const DensityField& field, const QuadratureOptions& opts = {});

std::vector<Vec2> sample(const DensityField& field, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream_base = 0);

// Stable identifier of the field's parameters (used to tie solves to densities).
std::string digest(const DensityField& field);

}  // namespace gtrans
