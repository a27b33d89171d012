#pragma once

#include <cmath>
#include <map>
#include <string>

#include "gtrans/fields.hpp"
#include "gtrans/geometry.hpp"
#include "gtrans/pma.hpp"
#include "gtrans/transport.hpp"

namespace fixtures {

using namespace gtrans;

inline DensityField ball(double R, DensityKind kind = Uniform{}) {
  return normalize(DensityField(Domain::ball(R), kind));
}

// Ellipse a=1.2, b=0.8 rescaled to the area of B_1.
inline ConvexBody ellipse_body(int n_theta = 256) {
  const double s = 1.0 / std::sqrt(1.2 * 0.8);
  return body_from_ellipse(1.2 * s, 0.8 * s, n_theta);
}

enum class Case { identity, doubling, square, ellipse };

// Solved maps at n_r = n_theta = 256, computed once per process.
inline const TransportMap& solved(Case c) {
  static std::map<Case, TransportMap> cache;
  auto it = cache.find(c);
  if (it != cache.end()) return it->second;
  GridSpec grid;
  grid.n_r = 256;
  grid.n_theta = 256;
  grid.r_stop = 0.05;
  DensityField rho0 = ball(1.0);
  DensityField rho1 = ball(1.0);
  ConvexBody A = body_from_disk(1.0, 256);
  if (c == Case::doubling) {
    rho1 = ball(2.0);
    grid.r_stop = 0.1;
  } else if (c == Case::square) {
    rho1 = ball(1.0, RadialPower{-1.0});
  } else if (c == Case::ellipse) {
    A = ellipse_body();
    rho0 = normalize(DensityField(Domain::of_body(A), Uniform{}));
  }
  SupportField f = solve_2d(A, rho0, rho1, grid);
  return cache.emplace(c, TransportMap(std::move(f), rho0, rho1)).first->second;
}

}  // namespace fixtures
