#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gtrans/error.hpp"

using namespace gtrans;
using namespace fixtures;
using doctest::Approx;

TEST_CASE("potential on radial cases") {
  CHECK(phi(solved(Case::identity), {0.3, 0.4}) == Approx(0.5).epsilon(1e-9));
  CHECK(phi(solved(Case::doubling), {0.0, 0.3}) == Approx(0.6).epsilon(1e-8));
  CHECK(phi(solved(Case::square), {0.3, 0.4}) == Approx(0.25).epsilon(1e-7));
}

TEST_CASE("normal and gradient norm") {
  const NormalGrad a = normal_and_grad(solved(Case::identity), {0.6, 0.0});
  CHECK(a.n.x == Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(a.n.y) < 1e-9);
  CHECK(a.grad == Approx(1.0).epsilon(1e-8));
  CHECK(normal_and_grad(solved(Case::doubling), {-0.2, 0.25}).grad == Approx(2.0).epsilon(1e-6));
  CHECK(normal_and_grad(solved(Case::square), {0.0, -0.5}).grad == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("forward and inverse maps") {
  const TransportMap& id = solved(Case::identity);
  for (Vec2 x : {Vec2{0.3, 0.4}, Vec2{-0.7, 0.1}, Vec2{0.05, -0.6}}) {
    const Vec2 y = forward(id, x);
    CHECK(norm(y - x) <= 1e-8);
    CHECK(norm(inverse(id, x) - x) <= 1e-8);
  }
  const Vec2 y = forward(solved(Case::doubling), {0.3, 0.0});
  CHECK(y.x == Approx(0.6).epsilon(1e-8));
  CHECK(std::abs(y.y) < 1e-8);
  const Vec2 x = inverse(solved(Case::doubling), {0.6, 0.0});
  CHECK(x.x == Approx(0.3).epsilon(1e-8));
  CHECK(std::abs(x.y) < 1e-8);
}

TEST_CASE("out-of-range points") {
  const TransportMap& id = solved(Case::identity);
  CHECK_THROWS_AS(phi(id, {1.2, 0.0}), Error);
  CHECK_THROWS_AS(phi(id, {0.01, 0.0}), Error);
  CHECK_FALSE(id.try_level({0.01, 0.0}).has_value());
  CHECK_THROWS_AS(inverse(id, {1.5, 0.0}), Error);
}

TEST_CASE("change-of-variables residual") {
  CHECK(cov_residual(solved(Case::identity), {0.3, 0.4}) <= 1e-8);
  CHECK(cov_residual(solved(Case::doubling), {0.3, -0.1}) <= 1e-7);
  const TransportMap& e = solved(Case::ellipse);
  for (Vec2 y : {Vec2{0.5, 0.0}, Vec2{0.0, 0.5}, Vec2{-0.3, 0.4}}) CHECK(cov_residual(e, inverse(e, y)) <= 5e-3);
}

TEST_CASE("finite-difference Jacobians") {
  CHECK(jacobian_fd(solved(Case::identity), {0.3, 0.4}, 1e-3) == Approx(1.0).epsilon(1e-6));
  CHECK(jacobian_fd(solved(Case::doubling), {0.3, 0.1}, 1e-3) == Approx(4.0).epsilon(1e-5));
  CHECK(jacobian_fd(solved(Case::square), {0.3, 0.4}, 1e-3) == Approx(0.5).epsilon(1e-4));
  CHECK(jacobian_predicted(solved(Case::square), {0.3, 0.4}) == Approx(0.5).epsilon(1e-5));
}

TEST_CASE("round trip on the ellipse") {
  CHECK(roundtrip_error(solved(Case::ellipse), 1000, 3) <= 1e-4);
}

TEST_CASE("pushforward test passes on closed-form cases") {
  const PushforwardReport id = pushforward_test(solved(Case::identity), 100000, 1);
  CHECK(id.radial_W1 <= 0.005);
  CHECK(id.pass);
  CHECK(pushforward_test(solved(Case::doubling), 100000, 2).pass);
  CHECK(pushforward_test(solved(Case::ellipse), 100000, 3).pass);
}

TEST_CASE("pushforward detects the wrong target") {
  // Claim the doubling solve transports onto B_1: samples land outside the annulus law.
  const TransportMap& d = solved(Case::doubling);
  SupportField f = d.field();
  f.digest.clear();
  for (double& h : f.H) h *= 1.15;
  const TransportMap wrong(f, d.rho0(), d.rho1());
  CHECK_FALSE(pushforward_test(wrong, 20000, 1).pass);
}

TEST_CASE("digest mismatch is rejected") {
  const SupportField& f = solved(Case::identity).field();
  CHECK_THROWS_AS(TransportMap(f, ball(1.0), ball(2.0)), Error);
}
