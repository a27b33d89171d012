#include "gtrans/discrete_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gtrans/error.hpp"
#include "gtrans/parallel.hpp"

namespace gtrans {

Vec2 scaling_map(Vec2 y, double t) {
  if (t < 0.0) fail(ErrorKind::invalid_argument, "scaling exponent must be nonnegative");
  const double r = norm(y);
  if (r == 0.0 || t == 0.0) return y;
  return std::pow(r, t) * y;
}

std::vector<double> assignment_costs(std::span<const Vec2> X, std::span<const Vec2> Y, double t) {
  if (X.size() != Y.size()) fail(ErrorKind::invalid_argument, "point clouds differ in size");
  const std::size_t n = X.size();
  std::vector<Vec2> SY(n);
  for (std::size_t j = 0; j < n; ++j) SY[j] = scaling_map(Y[j], t);
  std::vector<double> cost(n * n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 d = X[i] - SY[j];
      cost[i * n + j] = dot(d, d);
    }
  });
  return cost;
}

// Shortest augmenting paths with potentials (Hungarian method), O(n³).
AssignmentPlan solve_assignment(std::span<const double> cost, std::size_t n, std::size_t n_max) {
  if (n > n_max) fail(ErrorKind::size_limit, "assignment size " + std::to_string(n) + " exceeds " + std::to_string(n_max));
  if (cost.size() != n * n) fail(ErrorKind::invalid_argument, "cost matrix has the wrong size");
  AssignmentPlan plan;
  plan.n = n;
  if (n == 0) return plan;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual column 0, following the classical formulation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  auto c = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * n + (j - 1)]; };
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  plan.sigma.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) plan.sigma[p[j] - 1] = j - 1;
  plan.u.assign(u.begin() + 1, u.end());
  plan.v.assign(v.begin() + 1, v.end());
  for (std::size_t i = 0; i < n; ++i) plan.total_cost += cost[i * n + plan.sigma[i]];
  return plan;
}

AssignmentPlan solve_assignment(std::span<const Vec2> X, std::span<const Vec2> Y, double t, std::size_t n_max) {
  if (X.size() > n_max) fail(ErrorKind::size_limit, "assignment size " + std::to_string(X.size()) + " exceeds " + std::to_string(n_max));
  const auto cost = assignment_costs(X, Y, t);
  return solve_assignment(cost, X.size(), n_max);
}

double slackness_violation(const AssignmentPlan& plan, std::span<const double> cost) {
  const std::size_t n = plan.n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, plan.u[i] + plan.v[j] - cost[i * n + j]);
    }
    worst = std::max(worst, std::abs(plan.u[i] + plan.v[plan.sigma[i]] - cost[i * n + plan.sigma[i]]));
  }
  return worst;
}

std::vector<Vec2> prelimit_map(std::span<const Vec2> X, std::span<const Vec2> Y, double t, std::size_t n_max) {
  const auto plan = solve_assignment(X, Y, t, n_max);
  std::vector<Vec2> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = Y[plan.sigma[i]];
  return out;
}

std::vector<double> default_t_list() { return {1.0, 3.0, 10.0, 30.0, 100.0}; }

namespace {

DisplacementStats summarize(std::vector<double> d, double t, std::size_t n, std::uint64_t seed) {
  DisplacementStats s;
  s.t = t;
  s.n = n;
  s.seed = seed;
  s.n_used = d.size();
  if (d.empty()) return s;
  std::sort(d.begin(), d.end());
  double sum = 0.0;
  for (double x : d) sum += x;
  s.mean = sum / static_cast<double>(d.size());
  const std::size_t m = d.size();
  s.median = m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
  s.max = d.back();
  return s;
}

struct Clouds {
  std::vector<Vec2> X;
  std::vector<Vec2> Y;
  std::vector<Vec2> TX;
  std::vector<char> inside;
};

Clouds draw(const TransportMap& map, std::size_t n, std::uint64_t seed) {
  if (n > kAssignmentMax) fail(ErrorKind::size_limit, "sample size " + std::to_string(n) + " exceeds " + std::to_string(kAssignmentMax));
  Clouds c;
  c.X = sample(map.rho0(), n, seed, 0);
  c.Y = sample(map.rho1(), n, seed, 1);
  c.TX.resize(n);
  c.inside.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto lv = map.try_level(c.X[i])) {
      c.TX[i] = lv->r * unit_normal(lv->theta);
      c.inside[i] = 1;
    }
  }
  return c;
}

}  // namespace

std::vector<DisplacementStats> convergence_experiment(const TransportMap& map, std::size_t n, std::uint64_t seed,
                                                      std::span<const double> t_list) {
  const Clouds c = draw(map, n, seed);
  std::vector<DisplacementStats> rows(t_list.size());
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    const auto img = prelimit_map(c.X, c.Y, t_list[k]);
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) {
      if (c.inside[i]) d.push_back(norm(img[i] - c.TX[i]));
    }
    rows[k] = summarize(std::move(d), t_list[k], n, seed);
  }
  return rows;
}

double sampling_floor(const TransportMap& map, std::size_t n, std::uint64_t seed) {
  const Clouds c = draw(map, n, seed);
  std::vector<Vec2> A;
  std::vector<Vec2> B;
  for (std::size_t i = 0; i < n; ++i) {
    if (c.inside[i]) A.push_back(c.TX[i]);
  }
  B.assign(c.Y.begin(), c.Y.begin() + static_cast<std::ptrdiff_t>(A.size()));
  const auto plan = solve_assignment(A, B, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) sum += norm(A[i] - B[plan.sigma[i]]);
  return A.empty() ? 0.0 : sum / static_cast<double>(A.size());
}

bool decreasing_to_floor(std::span<const DisplacementStats> rows, double floor, double floor_factor) {
  const double level = floor_factor * floor;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k - 1].mean <= level) {
      if (rows[k].mean > level) return false;
      continue;
    }
    if (!(rows[k].mean < rows[k - 1].mean)) return false;
  }
  return true;
}

}  // namespace gtrans
