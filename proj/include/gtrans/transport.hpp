#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "gtrans/fields.hpp"
#include "gtrans/pma.hpp"

namespace gtrans {

// The Gauss transport T = φ·n encoded by a solved SupportField.
class TransportMap {
 public:
  // Throws invalid_argument when the field's digest does not match the densities.
  TransportMap(SupportField field, DensityField rho0, DensityField rho1);

  const SupportField& field() const { return *field_; }
  const DensityField& rho0() const { return rho0_; }
  const DensityField& rho1() const { return rho1_; }
  const FieldInterpolant& interpolant() const { return *interp_; }

  struct Level {
    double r = 0.0;      // φ(x)
    double theta = 0.0;  // angle of the outer normal of ∂A_r at x
  };

  // φ(x) and the supporting normal; out_of_range outside A_R or inside A_{r_stop}.
  Level level(Vec2 x) const;
  // Same, but nullopt instead of out_of_range.
  std::optional<Level> try_level(Vec2 x) const;

  // max_θ (<x, n(θ)> - H(r, θ)) with the maximizing angle.
  Level support_gap_at(Vec2 x, double r) const;

 private:
  void interpolate_row(double r, std::vector<double>& out) const;
  double grid_gap(Vec2 x, int k) const;
  int grid_argmax(Vec2 x, std::span<const double> H) const;

  // Shared so that copies keep the interpolant's reference valid.
  std::shared_ptr<const SupportField> field_;
  DensityField rho0_;
  DensityField rho1_;
  std::shared_ptr<const FieldInterpolant> interp_;
  std::vector<Vec2> normals_;
};

double phi(const TransportMap& map, Vec2 x);

struct NormalGrad {
  Vec2 n;
  double grad = 0.0;  // |∇φ| = 1 / H_r
};
NormalGrad normal_and_grad(const TransportMap& map, Vec2 x);

Vec2 forward(const TransportMap& map, Vec2 x);
// T⁻¹(y) = H n + H_θ v at (|y|, arg y); out_of_annulus outside [r_stop, R].
Vec2 inverse(const TransportMap& map, Vec2 y);

// |ρ0(x) - K |∇φ| φ ρ1(T x)| / ρ0(x).
double cov_residual(const TransportMap& map, Vec2 x);
// φ |∇φ| K at x, the Jacobian predicted by the change of variables.
double jacobian_predicted(const TransportMap& map, Vec2 x);

struct Jacobian2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
};
// Central-difference derivative of T.
Jacobian2 jacobian_matrix_fd(const TransportMap& map, Vec2 x, double step);
double jacobian_fd(const TransportMap& map, Vec2 x, double step);

// Max |T(T⁻¹(y)) - y| over `count` deterministic points of the annulus.
double roundtrip_error(const TransportMap& map, int count, std::uint64_t seed);

struct PushforwardReport {
  double radial_W1 = 0.0;
  double W1_bound = 0.0;
  double angular_chisq = 0.0;
  double angular_chisq_pvalue = 0.0;
  double grid_error = 0.0;
  double annulus_lo = 0.0;
  double annulus_hi = 0.0;
  std::size_t n_used = 0;
  int bins = 0;
  bool pass = false;
};

PushforwardReport pushforward_test(const TransportMap& map, std::size_t n, std::uint64_t seed, int bins = 32);

}  // namespace gtrans
