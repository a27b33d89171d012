#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gtrans/analysis.hpp"
#include "gtrans/error.hpp"

using namespace gtrans;
using namespace fixtures;
using doctest::Approx;

TEST_CASE("contact set of a paraboloid is everything") {
  const ContactSet cs = contact_set(radial_power_field(body_from_disk(1.0, 256), 2.0), 16, 401);
  REQUIRE(cs.levels.size() == 16);
  for (const ContactLevel& l : cs.levels) {
    CHECK(l.loops == 1);
    CHECK(l.contact_fraction == Approx(1.0));
    CHECK(l.turning == Approx(2 * M_PI).epsilon(0.02));
  }
  CHECK(cs.M == Approx(1.0).epsilon(1e-4));
  CHECK(cs.inf_boundary_f == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("two bumps open hull gaps") {
  const ContactSet cs =
      contact_set(two_bumps_field(body_from_disk(1.0, 256), {-0.4, 0.0}, {0.4, 0.0}, 0.25), 32, 401);
  double lowest = 1.0;
  for (const ContactLevel& l : cs.levels) lowest = std::min(lowest, l.contact_fraction);
  CHECK(lowest < 0.95);
}

TEST_CASE("constant field has no admissible levels") {
  CHECK_THROWS_AS(contact_set(constant_field(body_from_disk(1.0, 256), 2.0), 8, 101), Error);
  const EuclideanReport r = maxprin_euclidean(constant_field(body_from_disk(1.0, 256), 2.0), 8, 101);
  CHECK(r.degenerate);
  CHECK(r.lhs == Approx(0.0));
  CHECK(r.integral == 0.0);
  CHECK(r.pass);
}

TEST_CASE("Euclidean maximum principle on closed forms") {
  const EuclideanReport a = maxprin_euclidean(radial_power_field(body_from_disk(1.0, 256), 2.0), 32, 401);
  CHECK(a.target == Approx(M_PI).epsilon(1e-6));
  CHECK(a.ratio == Approx(1.0).epsilon(0.02));
  const EuclideanReport b = maxprin_euclidean(radial_power_field(body_from_disk(1.0, 256), 4.0), 32, 401);
  CHECK(b.ratio == Approx(1.0).epsilon(0.02));
  CHECK(b.pass);
}

TEST_CASE("sector maximum principle") {
  SectorField bump;
  const SectorReport r = maxprin_sector(bump, 200, 200);
  CHECK(r.sup_omega > r.sup_parabolic);
  CHECK(r.J > 0.0);
  CHECK(r.area_B <= r.J * 1.02);
  CHECK(r.C_Q == Approx(1.0 / std::cos(1.0)));
  CHECK(r.pass);

  SectorField c;
  c.kind = SectorField::Kind::constant;
  const SectorReport rc = maxprin_sector(c, 100, 100);
  CHECK(rc.J == 0.0);
  CHECK(rc.sup_omega == Approx(rc.sup_parabolic));
  CHECK(rc.pass);

  SectorField inc;
  inc.kind = SectorField::Kind::increasing;
  const SectorReport ri = maxprin_sector(inc, 100, 100);
  CHECK(ri.gamma_nodes == 0);
  CHECK(ri.J == 0.0);
  CHECK(ri.pass);
}

TEST_CASE("Sobolev check on the square-root map") {
  const SobolevReport s = sobolev_check(solved(Case::square), 1.0);
  CHECK(s.lhs == Approx(2.0).epsilon(0.01));
  CHECK(s.rhs1 == 0.0);
  CHECK(s.rhs2 == Approx(2.0 / M_PI).epsilon(0.01));
  CHECK(s.c_hat == Approx(M_PI).epsilon(0.01));
  CHECK(s.pass);
  CHECK(sobolev_inverse_constant(1.0, 1.0, 1.0 / (2 * M_PI)) == Approx(4 * M_PI));
}

TEST_CASE("Sobolev check requires the C/r target") {
  CHECK_THROWS_AS(sobolev_check(solved(Case::identity), 1.0), Error);
}

TEST_CASE("Gauss map pushforward and Gauss-Bonnet") {
  const ConvexBody e = body_from_ellipse(2.0, 1.0, 256);
  const GaussMapReport one = gaussmap_pushforward(e, [](double) { return 1.0; });
  CHECK(one.sphere_integral == Approx(2 * M_PI).epsilon(1e-12));
  CHECK(one.pass);
  const GaussMapReport c2 = gaussmap_pushforward(e, [](double t) { return std::cos(t) * std::cos(t); });
  CHECK(c2.boundary_integral == Approx(M_PI).epsilon(c2.tol));
  CHECK(c2.pass);
  const GaussMapReport d = gaussmap_pushforward(body_from_disk(1.0, 256), [](double t) { return std::cos(t) * std::cos(t); });
  CHECK(d.boundary_integral == Approx(M_PI).epsilon(d.tol));
  const double dth = 2 * M_PI / 256;
  CHECK(one.tol == Approx(10 * dth * dth));
}

TEST_CASE("isoperimetric check on the disk") {
  IsoOptions o;
  o.n_r = 128;
  o.samples = 50;
  const IsoReport r = isoperimetric_check(body_from_disk(1.0, 256), o);
  CHECK(r.ratio == Approx(1.0).epsilon(0.01));
  CHECK(r.amgm_violations == 0);
  CHECK(r.jacobian_median == Approx(1.0).epsilon(0.01));
  CHECK(r.divergence_flux == Approx(2 * M_PI).epsilon(0.01));
  CHECK(r.pass);
}
