#include <doctest.h>

#include <cmath>

#include "gtrans/error.hpp"
#include "gtrans/fields.hpp"
#include "gtrans/geometry.hpp"

using namespace gtrans;
using doctest::Approx;

namespace {
DensityField make(double R, DensityKind k) { return normalize(DensityField(Domain::ball(R), k)); }
}  // namespace

TEST_CASE("normalization constants") {
  CHECK(make(1.0, Uniform{}).Z() == Approx(1.0 / M_PI).epsilon(1e-10));
  CHECK(make(1.0, RadialPower{-1.0}).Z() == Approx(1.0 / (2 * M_PI)).epsilon(1e-10));
  CHECK(make(3.0, RadialPower{-1.0}).Z() == Approx(1.0 / (6 * M_PI)).epsilon(1e-10));
  CHECK(make(1.0, AngularCosine{0.5, 3}).Z() == Approx(1.0 / M_PI).epsilon(1e-10));
  CHECK(total_mass(make(1.0, GaussianTrunc{0.4})) == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("body-supported densities normalize") {
  const DensityField e = normalize(DensityField(Domain::of_body(body_from_ellipse(2.0, 1.0, 256)), Uniform{}));
  CHECK(e.Z() == Approx(1.0 / (2 * M_PI)).epsilon(1e-8));
}

TEST_CASE("point evaluation") {
  CHECK(eval(make(1.0, Uniform{}), {0.3, 0.4}) == Approx(1.0 / M_PI));
  CHECK(eval(make(1.0, RadialPower{-1.0}), {0.5, 0.0}) == Approx(1.0 / M_PI));
  CHECK(eval(make(1.0, AngularCosine{0.5, 3}), {0.5, 0.0}) == Approx(1.5 / M_PI));
  CHECK_THROWS_AS(eval(make(1.0, Uniform{}), {1.5, 0.0}), Error);
}

TEST_CASE("radial CDF") {
  CHECK(radial_cdf(make(1.0, Uniform{}), 0.5) == Approx(0.25));
  CHECK(radial_cdf(make(2.0, RadialPower{-1.0}), 1.0) == Approx(0.5));
  CHECK(radial_cdf(make(2.0, Uniform{}), 1.0) == Approx(0.25));
  CHECK_THROWS_AS(radial_cdf(make(1.0, AngularCosine{0.5, 3}), 0.5), Error);
}

TEST_CASE("sector mass") {
  const DensityField u = make(1.0, Uniform{});
  CHECK(sector_mass(u, 0.0, 1.0, 0.0, M_PI / 2) == Approx(0.25).epsilon(1e-10));
  CHECK(sector_mass(u, 0.5, 1.0, 0.0, 2 * M_PI) == Approx(0.75).epsilon(1e-10));
}

TEST_CASE("sampling") {
  const auto u = sample(make(1.0, Uniform{}), 100000, 7);
  double m = 0.0;
  for (Vec2 p : u) m += norm(p);
  CHECK(m / u.size() == Approx(2.0 / 3.0).epsilon(0.015));
  const auto r = sample(make(1.0, RadialPower{-1.0}), 100000, 7);
  m = 0.0;
  for (Vec2 p : r) m += norm(p);
  CHECK(m / r.size() == Approx(0.5).epsilon(0.02));
  CHECK(sample(make(1.0, Uniform{}), 0, 1).empty());
}

TEST_CASE("sampling is deterministic and chunk independent") {
  const DensityField f = make(1.0, AngularCosine{0.5, 2});
  const auto a = sample(f, 5000, 42);
  const auto b = sample(f, 5000, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
  const auto c = sample(f, 5000, 43);
  CHECK(c[0].x != a[0].x);
}

TEST_CASE("digest distinguishes densities") {
  CHECK(digest(make(1.0, Uniform{})) == digest(make(1.0, Uniform{})));
  CHECK(digest(make(1.0, Uniform{})) != digest(make(2.0, Uniform{})));
  CHECK(digest(make(1.0, RadialPower{-1.0})) != digest(make(1.0, Uniform{})));
}

TEST_CASE("non-integrable singularity is rejected") {
  CHECK_THROWS_AS(make(1.0, RadialPower{-2.0}), Error);
}
