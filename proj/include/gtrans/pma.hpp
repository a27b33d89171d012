#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "gtrans/fields.hpp"
#include "gtrans/geometry.hpp"

namespace gtrans {

// Support values H(r_k, θ_j) of the nested level sets A_r = {φ <= r}.
// Row 0 is r = R (the body's boundary datum), row n_r is r = r_stop.
struct SupportField {
  int d = 2;
  double R = 1.0;
  double r_stop = 0.05;
  int n_r = 0;
  int n_theta = 0;
  std::vector<double> H;  // row-major, (n_r + 1) x n_theta
  std::string digest;     // densities used by the solve; empty when unknown

  double dr() const { return (R - r_stop) / n_r; }
  double r(int k) const { return R - dr() * k; }
  double dtheta() const { return kTwoPi / n_theta; }
  double theta(int j) const { return dtheta() * j; }
  std::span<const double> row(int k) const {
    return {H.data() + static_cast<std::size_t>(k) * n_theta, static_cast<std::size_t>(n_theta)};
  }
  double at(int k, int j) const { return H[static_cast<std::size_t>(k) * n_theta + static_cast<std::size_t>(j)]; }
};

struct GridSpec {
  int n_r = 256;
  int n_theta = kDefaultNTheta;
  double r_stop = 0.0;  // absolute; 0 means 0.05 R
};

struct SolverOptions {
  DiffRule rule = DiffRule::spectral;
  double frac_degenerate = 0.01;
  // Fraction of the explicit RK4 stability limit used for substeps.
  double stability_safety = 0.5;
  int max_halvings = 12;
};

struct SolveStats {
  long substeps = 0;
  long clamp_count = 0;
  long halvings = 0;
  double min_radius = 0.0;  // smallest H + H_θθ seen at accepted states
};

// Marches dH/dr = P / (ρ0(T⁻¹)(H + H_θθ)), P = ρ1(r n) r, from the datum H(R,·) = h_A inward.
SupportField solve_2d(const ConvexBody& A, const DensityField& rho0, const DensityField& rho1,
                      const GridSpec& grid, const SolverOptions& opts = {}, SolveStats* stats = nullptr);

// Radially symmetric transport r = q(s) between radial fields in dimension d.
class RadialProfile {
 public:
  RadialProfile(DensityField rho0, DensityField rho1, int nodes = 1024);

  int d() const { return rho0_.dim(); }
  double s_max() const { return s_max_; }
  double R() const { return R_; }
  // q(s) = F_ν⁻¹(F_μ(s)) and its inverse, by monotone CDF inversion.
  double q(double s) const;
  double q_inv(double r) const;
  std::span<const double> s_grid() const { return s_; }
  std::span<const double> q_grid() const { return q_; }
  double max_cdf_mismatch() const;

 private:
  DensityField rho0_;
  DensityField rho1_;
  double s_max_;
  double R_;
  std::vector<double> s_;
  std::vector<double> q_;
};

RadialProfile solve_radial(int d, const DensityField& rho0, const DensityField& rho1);

// Level radii H(r_k) for ball-to-ball radial problems by RK4 on
// H_r = ρ1(r) r^{d-1} / (ρ0(H) H^{d-1}); independent of the CDF route.
std::vector<double> march_radial(const DensityField& rho0, const DensityField& rho1, int n_r, double r_stop);

// Four consecutive rows and cubic Lagrange weights (and d/dr weights) at radius r.
struct RowStencil {
  int base = 0;
  double w[4] = {};
  double dw[4] = {};
};
RowStencil row_stencil(const SupportField& field, double r);

// Support values at arbitrary (r, θ): cubic Lagrange across rows, trigonometric
// interpolation across angles.
class FieldInterpolant {
 public:
  explicit FieldInterpolant(const SupportField& field);

  struct Value {
    double H = 0.0;
    double H_theta = 0.0;
    double H_thetatheta = 0.0;
    double H_r = 0.0;
  };

  Value at(double r, double theta) const;
  // Interpolated coefficient row at radius r (and its r-derivative).
  void coefficients(double r, std::vector<std::complex<double>>& c, std::vector<std::complex<double>>* dc) const;
  const SupportField& field() const { return *field_; }

 private:
  const SupportField* field_;
  std::vector<std::vector<std::complex<double>>> rows_;
};

// 2-D chart z = -cot θ on the lower half circle: θ(z) = 3π/2 + atan z.
double chart_angle(double z);
// u(z_i, r_k) = sqrt(1 + z²) H(r_k, θ(z_i)); result is row-major (n_r + 1) x m.
std::vector<double> chart_u_from_H(const SupportField& field, std::span<const double> z);

// |(H + H_θθ) - (1 + z²)^{3/2} u_zz| / (H + H_θθ) with u_zz by finite differences in z.
double chart_identity_residual(const FieldInterpolant& interp, double z, double r);
// Relative residual of u_r u_zz = [r / (1 + z²)] ρ1(V(z, r)) / ρ0(u_z, z u_z - u).
double ma1_residual(const FieldInterpolant& interp, const DensityField& rho0, const DensityField& rho1,
                    double z, double r);

// Validates SupportField invariants (shape, row convexity, radial monotonicity).
void check_support_field(const SupportField& field);

}  // namespace gtrans
