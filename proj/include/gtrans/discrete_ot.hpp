#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gtrans/transport.hpp"

namespace gtrans {

inline constexpr std::size_t kAssignmentMax = 1024;

// S_t(y) = y |y|^t.
Vec2 scaling_map(Vec2 y, double t);

// Optimal bijection for c(i, j) = |x_i - S_t(y_j)|² with dual potentials
// u_i + v_j <= c(i, j), tight on matched pairs.
struct AssignmentPlan {
  std::size_t n = 0;
  std::vector<std::size_t> sigma;
  double total_cost = 0.0;
  std::vector<double> u;
  std::vector<double> v;
};

AssignmentPlan solve_assignment(std::span<const Vec2> X, std::span<const Vec2> Y, double t,
                                std::size_t n_max = kAssignmentMax);
// Exact assignment for an explicit n x n cost matrix (row-major).
AssignmentPlan solve_assignment(std::span<const double> cost, std::size_t n, std::size_t n_max = kAssignmentMax);

// Largest violation of u_i + v_j <= c(i, j) and of equality on matched pairs.
double slackness_violation(const AssignmentPlan& plan, std::span<const double> cost);

std::vector<double> assignment_costs(std::span<const Vec2> X, std::span<const Vec2> Y, double t);

// x_i ↦ y_{σ(i)}: the discrete pre-limit map T_t.
std::vector<Vec2> prelimit_map(std::span<const Vec2> X, std::span<const Vec2> Y, double t,
                               std::size_t n_max = kAssignmentMax);

struct DisplacementStats {
  double t = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::size_t n = 0;
  std::size_t n_used = 0;
  std::uint64_t seed = 0;
};

std::vector<double> default_t_list();

// For each t, |T_t(x_i) - T(x_i)| over μ-samples whose level lies in the solved annulus.
std::vector<DisplacementStats> convergence_experiment(const TransportMap& map, std::size_t n, std::uint64_t seed,
                                                      std::span<const double> t_list);

// Matching noise of two independent ν-clouds of size n: mean |T(x_i) - y_{σ(i)}| with
// σ the quadratic-cost optimal assignment between T(X) and Y.
double sampling_floor(const TransportMap& map, std::size_t n, std::uint64_t seed);

// True if mean displacement decreases strictly along t until it is within
// floor_factor of the floor (after which it only has to stay there).
bool decreasing_to_floor(std::span<const DisplacementStats> rows, double floor, double floor_factor = 2.0);

}  // namespace gtrans
