#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gtrans/error.hpp"

using namespace gtrans;
using namespace fixtures;
using doctest::Approx;

TEST_CASE("identity transport reproduces H = r") {
  const SupportField& f = solved(Case::identity).field();
  double err = 0.0;
  for (int k = 0; k <= f.n_r; ++k) {
    for (int j = 0; j < f.n_theta; ++j) err = std::max(err, std::abs(f.at(k, j) - f.r(k)));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("radial doubling gives H = r / 2") {
  const SupportField& f = solved(Case::doubling).field();
  double err = 0.0;
  for (int k = 0; k <= f.n_r; ++k) {
    for (int j = 0; j < f.n_theta; ++j) err = std::max(err, std::abs(f.at(k, j) - 0.5 * f.r(k)));
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("radial CDF-inversion profiles") {
  const RadialProfile id = solve_radial(2, ball(1.0), ball(1.0));
  const RadialProfile dbl = solve_radial(2, ball(1.0), ball(2.0));
  const RadialProfile sq = solve_radial(2, ball(1.0), ball(1.0, RadialPower{-1.0}));
  for (double s : {0.1, 0.3, 0.5, 0.9}) {
    CHECK(id.q(s) == Approx(s).epsilon(1e-12));
    CHECK(dbl.q(s) == Approx(2 * s).epsilon(1e-12));
    CHECK(sq.q(s) == Approx(s * s).epsilon(1e-12));
    CHECK(sq.q_inv(s * s) == Approx(s).epsilon(1e-12));
  }
  CHECK(sq.max_cdf_mismatch() < 1e-12);
}

TEST_CASE("radial profiles in three dimensions") {
  const auto b1 = normalize(DensityField(Domain::ball(1.0), Uniform{}, 3));
  const auto b2 = normalize(DensityField(Domain::ball(2.0), Uniform{}, 3));
  const RadialProfile p = solve_radial(3, b1, b2);
  CHECK(p.q(0.4) == Approx(0.8).epsilon(1e-12));
}

TEST_CASE("RK4 radial march agrees with the CDF oracle") {
  const auto rho1 = ball(1.0, RadialPower{-1.0});
  const auto H = march_radial(ball(1.0), rho1, 256, 0.05);
  const RadialProfile sq = solve_radial(2, ball(1.0), rho1);
  const double dr = (1.0 - 0.05) / 256;
  double err = 0.0;
  for (int k = 0; k <= 256; ++k) err = std::max(err, std::abs(H[k] - sq.q_inv(1.0 - dr * k)));
  CHECK(err <= 1e-7);
}

TEST_CASE("square-root target matches the radial oracle in the 2-D solve") {
  const SupportField& f = solved(Case::square).field();
  double err = 0.0;
  for (int k = 0; k <= f.n_r; ++k) {
    for (int j = 0; j < f.n_theta; j += 7) err = std::max(err, std::abs(f.at(k, j) - std::sqrt(f.r(k))));
  }
  CHECK(err <= 1e-7);
}

TEST_CASE("chart conversion") {
  const SupportField& f = solved(Case::identity).field();
  const std::vector<double> z{-1.0, 0.0, 0.5};
  const auto u = chart_u_from_H(f, z);
  for (int k = 0; k <= f.n_r; k += 64) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      CHECK(u[k * z.size() + i] == Approx(f.r(k) * std::sqrt(1 + z[i] * z[i])).epsilon(1e-10));
    }
  }
  CHECK(chart_angle(0.0) == Approx(1.5 * M_PI));

  const SupportField& d = solved(Case::doubling).field();
  const auto ud = chart_u_from_H(d, z);
  CHECK(ud[64 * 3 + 2] == Approx(0.5 * d.r(64) * std::sqrt(1.25)).epsilon(1e-8));
}

TEST_CASE("chart residuals vanish on closed-form solutions") {
  const TransportMap& id = solved(Case::identity);
  const TransportMap& dbl = solved(Case::doubling);
  for (double z : {-1.5, 0.0, 0.7}) {
    for (double r : {0.3, 0.7}) {
      CHECK(chart_identity_residual(id.interpolant(), z, r) <= 1e-8);
      CHECK(ma1_residual(id.interpolant(), id.rho0(), id.rho1(), z, r) <= 1e-8);
      CHECK(chart_identity_residual(dbl.interpolant(), z, 2 * r) <= 1e-8);
      CHECK(ma1_residual(dbl.interpolant(), dbl.rho0(), dbl.rho1(), z, 2 * r) <= 1e-7);
    }
  }
}

TEST_CASE("ellipse solve is convex, clamp-free and chart-consistent") {
  const TransportMap& m = solved(Case::ellipse);
  CHECK_NOTHROW(check_support_field(m.field()));
  for (double z : {-1.0, 0.0, 1.0}) {
    CHECK(chart_identity_residual(m.interpolant(), z, 0.5) <= 1e-3);
    CHECK(ma1_residual(m.interpolant(), m.rho0(), m.rho1(), z, 0.5) <= 1e-3);
  }
}

TEST_CASE("solver stats and invalid inputs") {
  GridSpec g;
  g.n_r = 64;
  g.n_theta = 64;
  SolveStats st;
  solve_2d(body_from_disk(1.0, 64), ball(1.0), ball(1.0), g, {}, &st);
  CHECK(st.clamp_count == 0);
  CHECK(st.substeps >= 64);
  CHECK(st.min_radius > 0.0);

  GridSpec bad = g;
  bad.n_theta = 100;
  CHECK_THROWS_AS(solve_2d(body_from_disk(1.0, 64), ball(1.0), ball(1.0), bad), Error);
  const auto on_body = normalize(DensityField(Domain::of_body(body_from_disk(1.0, 64)), Uniform{}));
  CHECK_THROWS_AS(solve_2d(body_from_disk(1.0, 64), ball(1.0), on_body, g), Error);
  const DensityField raw(Domain::ball(1.0), Uniform{});
  CHECK_THROWS_AS(solve_2d(body_from_disk(1.0, 64), raw, ball(1.0), g), Error);
}

TEST_CASE("corrupted fields violate invariants") {
  SupportField f = solved(Case::identity).field();
  CHECK_NOTHROW(check_support_field(f));
  for (int j = 0; j < f.n_theta; ++j) f.H[128 * f.n_theta + j] *= 1.5;
  CHECK_THROWS_AS(check_support_field(f), Error);
}
