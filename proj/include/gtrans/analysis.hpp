#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gtrans/transport.hpp"

namespace gtrans {

// ---------------------------------------------------------------------------
// Closed-form test functions on a convex body.

struct ScalarFieldOnBody {
  enum class Kind { radial_power, quadratic_bump, two_bumps, constant };

  ConvexBody body;
  Kind kind = Kind::radial_power;
  double power = 2.0;               // radial_power: v = 1 - |x|^power
  Vec2 center{0.0, 0.0};            // quadratic_bump: v = 1 - |x - c|² / width²
  Vec2 center2{0.0, 0.0};           // two_bumps: Gaussians at center and center2
  double width = 0.3;
  double value_c = 1.0;             // constant
  bool smooth = true;

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  std::string name() const;
};

ScalarFieldOnBody radial_power_field(ConvexBody body, double power);
ScalarFieldOnBody quadratic_bump_field(ConvexBody body, Vec2 center, double width);
ScalarFieldOnBody two_bumps_field(ConvexBody body, Vec2 c1, Vec2 c2, double width);
ScalarFieldOnBody constant_field(ConvexBody body, double c);

struct ContactPoint {
  Vec2 x;
  double K = 0.0;       // curvature of the level curve
  double dl = 0.0;      // arclength weight
  double grad_v = 0.0;  // |∇v|
  Vec2 normal;          // outer normal of the sublevel set of f
  bool contact = false;
};

struct ContactLevel {
  double tau = 0.0;  // level of f = (M - v)^{1/2}
  std::vector<ContactPoint> points;
  int loops = 0;
  double contact_fraction = 0.0;
  double turning = 0.0;  // Σ K dl over contact points
};

struct ContactSet {
  double M = 0.0;               // sup_A v
  double sup_boundary_v = 0.0;  // sup_{∂A} v
  double inf_boundary_f = 0.0;  // inf_{∂A} f
  double h = 0.0;               // fine-grid spacing
  double hull_tol = 0.0;
  std::vector<ContactLevel> levels;
};

// Contact points of the sublevel sets {f <= τ}, τ at `levels` midpoints of (0, inf_∂A f),
// via marching squares on a grid x grid lattice and monotone-chain hulls.
ContactSet contact_set(const ScalarFieldOnBody& v, int levels = 64, int grid = 801);

struct EuclideanReport {
  double lhs = 0.0;       // sup_A v - sup_∂A v
  double integral = 0.0;  // I = ∫_C f |∇f| K dx
  double target = 0.0;    // π (inf_∂A f)²
  double ratio = 0.0;
  double covered_fraction = 0.0;
  double min_contact_fraction = 1.0;
  int levels = 0;
  int grid = 0;
  bool degenerate = false;
  bool pass = false;
};

EuclideanReport maxprin_euclidean(const ScalarFieldOnBody& v, int levels = 64, int grid = 801, double tol = 0.02);
EuclideanReport maxprin_euclidean(const ContactSet& cs, int grid, double tol = 0.02);

// ---------------------------------------------------------------------------
// Spherical-sector maximum principle.

struct SectorField {
  enum class Kind { constant, bump, increasing };

  double R1 = 0.5;
  double R2 = 1.5;
  double theta_a = kPi / 2 - 0.5;
  double theta_b = kPi / 2 + 0.5;
  Kind kind = Kind::bump;
  double c = 1.0;             // amplitude / constant value
  double bump_center = kPi / 2;
  double bump_width = 0.8;    // full support width of the angular bump

  struct Value {
    double f = 0.0;
    double f_r = 0.0;
    double f_thetatheta = 0.0;
  };
  Value eval(double r, double theta) const;
  std::string name() const;
};

struct SectorReport {
  double sup_omega = 0.0;
  double sup_parabolic = 0.0;
  double J = 0.0;
  double C_Q = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double area_B = 0.0;
  double bound = 0.0;  // C1 sup_∂pΩ f + C2 J^{1/2}
  long gamma_nodes = 0;
  bool covering_ok = false;
  bool bound_ok = false;
  bool pass = false;
  std::vector<std::pair<double, double>> gamma_points;  // (r, θ) nodes in Γ_f
};

SectorReport maxprin_sector(const SectorField& f, int n_r = 400, int n_theta = 400, double tol = 0.02);

// ---------------------------------------------------------------------------
// Sobolev estimate for φ when ρ1 = C / r.

struct SobolevReport {
  double p = 1.0;
  double lhs = 0.0;   // ∫ |∇φ|^{p+1} dμ over the solved annulus
  double rhs1 = 0.0;  // ∫ |∇ρ0/ρ0|^{p+1} dμ
  double rhs2 = 0.0;  // ∫_∂A K^{-p} ρ0^{p+1} dH¹
  double boundary_term = 0.0;  // ∫_∂A |∇φ|^p ρ0 dH¹
  double c_hat = 0.0;
  double inv_C_impl = 0.0;
  double two_term_bound = 0.0;
  bool pass = false;
};

// 1 / C_impl = max(2R C^{-p}, 2(2p)^p R^{p+1}) with ρ1 = C r^{-(d-1)} on B_R.
double sobolev_inverse_constant(double p, double R, double C);
SobolevReport sobolev_check(const TransportMap& map, double p, int radial_nodes = 64);

// ---------------------------------------------------------------------------
// Gauss map pushforward and Gauss-Bonnet.

struct GaussMapReport {
  double boundary_integral = 0.0;  // ∫_∂A f(n) K dH¹ by chord lengths
  double sphere_integral = 0.0;    // ∫_S¹ f dH¹
  double rel_error = 0.0;
  double tol = 0.0;  // 10 Δθ²
  bool pass = false;
};

GaussMapReport gaussmap_pushforward(const ConvexBody& body, const std::function<double(double)>& f);

// ---------------------------------------------------------------------------
// Transport proof of the isoperimetric inequality.

struct IsoOptions {
  int n_r = 256;
  int samples = 200;
  std::uint64_t seed = 1;
  double jac_step = 1e-3;
  double tol_iso = 0.01;
};

struct IsoReport {
  double area = 0.0;
  double perimeter = 0.0;
  double R = 0.0;
  double bound = 0.0;          // (R/d) perimeter
  double bound_printed = 0.0;  // (R/(d-1)) perimeter
  double ratio = 0.0;          // bound / area
  double divergence_flux = 0.0;  // ∮ <T, n> ds
  double jacobian_median = 0.0;
  int amgm_samples = 0;
  int amgm_violations = 0;
  bool pass = false;
};

IsoReport isoperimetric_check(const ConvexBody& A, const IsoOptions& opts = {});

}  // namespace gtrans
