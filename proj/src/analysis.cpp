#include "gtrans/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>

#include "gtrans/error.hpp"
#include "gtrans/parallel.hpp"

namespace gtrans {

// ---------------------------------------------------------------------------
// Test functions

double ScalarFieldOnBody::value(Vec2 x) const {
  switch (kind) {
    case Kind::radial_power: return 1.0 - std::pow(norm(x), power);
    case Kind::quadratic_bump: {
      const Vec2 d = x - center;
      return 1.0 - dot(d, d) / (width * width);
    }
    case Kind::two_bumps: {
      const Vec2 d1 = x - center;
      const Vec2 d2 = x - center2;
      const double w2 = width * width;
      return std::exp(-dot(d1, d1) / w2) + std::exp(-dot(d2, d2) / w2);
    }
    case Kind::constant: return value_c;
  }
  return 0.0;
}

Vec2 ScalarFieldOnBody::gradient(Vec2 x) const {
  switch (kind) {
    case Kind::radial_power: {
      const double r = norm(x);
      if (r == 0.0) return {0.0, 0.0};
      return (-power * std::pow(r, power - 2.0)) * x;
    }
    case Kind::quadratic_bump: return (-2.0 / (width * width)) * (x - center);
    case Kind::two_bumps: {
      const Vec2 d1 = x - center;
      const Vec2 d2 = x - center2;
      const double w2 = width * width;
      return (-2.0 / w2 * std::exp(-dot(d1, d1) / w2)) * d1 + (-2.0 / w2 * std::exp(-dot(d2, d2) / w2)) * d2;
    }
    case Kind::constant: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

std::string ScalarFieldOnBody::name() const {
  switch (kind) {
    case Kind::radial_power: return "radial_power";
    case Kind::quadratic_bump: return "quadratic_bump";
    case Kind::two_bumps: return "two_bumps";
    case Kind::constant: return "constant";
  }
  return "unknown";
}

ScalarFieldOnBody radial_power_field(ConvexBody body, double power) {
  if (!(power > 0.0)) fail(ErrorKind::invalid_argument, "radial power must be positive");
  ScalarFieldOnBody v{std::move(body)};
  v.kind = ScalarFieldOnBody::Kind::radial_power;
  v.power = power;
  v.smooth = power >= 2.0;
  return v;
}

ScalarFieldOnBody quadratic_bump_field(ConvexBody body, Vec2 center, double width) {
  if (!(width > 0.0)) fail(ErrorKind::invalid_argument, "bump width must be positive");
  ScalarFieldOnBody v{std::move(body)};
  v.kind = ScalarFieldOnBody::Kind::quadratic_bump;
  v.center = center;
  v.width = width;
  return v;
}

ScalarFieldOnBody two_bumps_field(ConvexBody body, Vec2 c1, Vec2 c2, double width) {
  if (!(width > 0.0)) fail(ErrorKind::invalid_argument, "bump width must be positive");
  ScalarFieldOnBody v{std::move(body)};
  v.kind = ScalarFieldOnBody::Kind::two_bumps;
  v.center = c1;
  v.center2 = c2;
  v.width = width;
  return v;
}

ScalarFieldOnBody constant_field(ConvexBody body, double c) {
  ScalarFieldOnBody v{std::move(body)};
  v.kind = ScalarFieldOnBody::Kind::constant;
  v.value_c = c;
  return v;
}

// ---------------------------------------------------------------------------
// Contour extraction and hulls

namespace {

struct Lattice {
  int N = 0;
  double lo = 0.0;
  double h = 0.0;
  std::vector<double> F;  // F[j * N + i] at (lo + i h, lo + j h)

  Vec2 node(int i, int j) const { return {lo + h * i, lo + h * j}; }
  double at(int i, int j) const { return F[static_cast<std::size_t>(j) * N + i]; }
};

// Closed level curves {F = tau} as ordered point loops.
std::vector<std::vector<Vec2>> marching_squares(const Lattice& L, double tau) {
  const int N = L.N;
  auto edge_id = [N](int i, int j, bool vertical) {
    return 2 * (static_cast<long>(j) * N + i) + (vertical ? 1 : 0);
  };
  std::unordered_map<long, Vec2> where;
  std::unordered_map<long, std::array<long, 2>> links;
  auto crossing = [&](long id, Vec2 a, double fa, Vec2 b, double fb) {
    if (!where.count(id)) {
      const double s = (tau - fa) / (fb - fa);
      where[id] = a + s * (b - a);
    }
    return id;
  };
  auto connect = [&](long a, long b) {
    for (auto [p, q] : {std::pair{a, b}, std::pair{b, a}}) {
      auto it = links.find(p);
      if (it == links.end()) links[p] = {q, -1};
      else it->second[1] = q;
    }
  };
  for (int j = 0; j + 1 < N; ++j) {
    for (int i = 0; i + 1 < N; ++i) {
      const double f0 = L.at(i, j), f1 = L.at(i + 1, j), f2 = L.at(i + 1, j + 1), f3 = L.at(i, j + 1);
      const int mask = (f0 < tau ? 1 : 0) | (f1 < tau ? 2 : 0) | (f2 < tau ? 4 : 0) | (f3 < tau ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      const Vec2 p0 = L.node(i, j), p1 = L.node(i + 1, j), p2 = L.node(i + 1, j + 1), p3 = L.node(i, j + 1);
      long e[4];
      const bool c0 = (mask & 1) != 0, c1 = (mask & 2) != 0, c2 = (mask & 4) != 0, c3 = (mask & 8) != 0;
      e[0] = c0 != c1 ? crossing(edge_id(i, j, false), p0, f0, p1, f1) : -1;
      e[1] = c1 != c2 ? crossing(edge_id(i + 1, j, true), p1, f1, p2, f2) : -1;
      e[2] = c3 != c2 ? crossing(edge_id(i, j + 1, false), p3, f3, p2, f2) : -1;
      e[3] = c0 != c3 ? crossing(edge_id(i, j, true), p0, f0, p3, f3) : -1;
      if (mask == 5 || mask == 10) {
        const bool center_in = 0.25 * (f0 + f1 + f2 + f3) < tau;
        // Saddle: the diagonal pair sharing the center's side stays connected.
        if ((mask == 5) == center_in) {
          connect(e[0], e[1]);
          connect(e[2], e[3]);
        } else {
          connect(e[0], e[3]);
          connect(e[1], e[2]);
        }
        continue;
      }
      long ends[2];
      int k = 0;
      for (long id : e) {
        if (id >= 0) ends[k++] = id;
      }
      connect(ends[0], ends[1]);
    }
  }
  // Deterministic traversal order: sort crossing ids.
  std::vector<long> ids;
  ids.reserve(links.size());
  for (const auto& kv : links) ids.push_back(kv.first);
  std::sort(ids.begin(), ids.end());
  std::unordered_map<long, char> seen;
  std::vector<std::vector<Vec2>> loops;
  for (long start : ids) {
    if (seen[start]) continue;
    std::vector<Vec2> loop;
    long prev = -1;
    long cur = start;
    while (cur >= 0 && !seen[cur]) {
      seen[cur] = 1;
      loop.push_back(where[cur]);
      const auto& nb = links[cur];
      const long next = nb[0] != prev ? nb[0] : nb[1];
      prev = cur;
      cur = next;
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

// Andrew's monotone chain; counterclockwise without repeated endpoint.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    const Vec2& p = pts[i];
    while (k >= t && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

// Distance from an interior point to the boundary of a convex polygon.
double distance_to_hull(const std::vector<Vec2>& hull, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 a = hull[i];
    const Vec2 b = hull[(i + 1) % hull.size()];
    const Vec2 e = b - a;
    const double len = norm(e);
    if (len == 0.0) continue;
    best = std::min(best, std::abs(cross(e, p - a)) / len);
  }
  return best;
}

double circumcurvature(Vec2 a, Vec2 b, Vec2 c) {
  const double denom = norm(b - a) * norm(c - b) * norm(c - a);
  if (denom == 0.0) return 0.0;
  return 2.0 * std::abs(cross(b - a, c - a)) / denom;
}

}  // namespace

ContactSet contact_set(const ScalarFieldOnBody& v, int levels, int grid) {
  if (levels < 1) fail(ErrorKind::invalid_argument, "need at least one level");
  if (grid < 16) fail(ErrorKind::invalid_argument, "contact grid is too coarse");
  if (grid % 2 == 0) ++grid;  // keep the origin on the lattice
  const ConvexBody& A = v.body;
  ContactSet cs;
  double sup_b = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < A.n_theta(); ++j) sup_b = std::max(sup_b, v.value(boundary_point(A, j)));
  cs.sup_boundary_v = sup_b;

  Lattice L;
  L.N = grid;
  const double extent = A.max_h() / std::cos(0.5 * A.dtheta());
  L.lo = -extent;
  L.h = 2.0 * extent / (grid - 1);
  cs.h = L.h;
  cs.hull_tol = 2.0 * L.h;
  std::vector<char> inside(static_cast<std::size_t>(grid) * grid);
  double M = sup_b;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const Vec2 x = L.node(i, j);
      const bool in = contains(A, x);
      inside[static_cast<std::size_t>(j) * grid + i] = in ? 1 : 0;
      if (in) M = std::max(M, v.value(x));
    }
  }
  cs.M = M;
  double inf_f = std::numeric_limits<double>::infinity();
  for (int j = 0; j < A.n_theta(); ++j) {
    inf_f = std::min(inf_f, std::sqrt(std::max(M - v.value(boundary_point(A, j)), 0.0)));
  }
  cs.inf_boundary_f = inf_f;
  if (!(inf_f > 1e-12 * std::max(1.0, std::abs(M)))) {
    fail(ErrorKind::empty_level, "no admissible levels: sup over A equals the boundary infimum of f");
  }
  L.F.resize(inside.size());
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * grid + i;
      L.F[idx] = inside[idx] ? std::sqrt(std::max(M - v.value(L.node(i, j)), 0.0)) : inf_f;
    }
  }

  cs.levels.resize(static_cast<std::size_t>(levels));
  const double dtau = inf_f / levels;
  parallel_for(cs.levels.size(), [&](std::size_t l) {
    ContactLevel& lv = cs.levels[l];
    lv.tau = (static_cast<double>(l) + 0.5) * dtau;
    const auto loops = marching_squares(L, lv.tau);
    if (loops.empty()) fail(ErrorKind::empty_level, "level " + std::to_string(lv.tau) + " has no sublevel set");
    lv.loops = static_cast<int>(loops.size());
    std::vector<Vec2> all;
    for (const auto& loop : loops) all.insert(all.end(), loop.begin(), loop.end());
    const auto hull = convex_hull(all);
    double total = 0.0;
    double on_hull = 0.0;
    for (const auto& loop : loops) {
      const int n = static_cast<int>(loop.size());
      const int s = std::clamp(n / 32, 1, 8);
      for (int k = 0; k < n; ++k) {
        const Vec2 prev = loop[static_cast<std::size_t>((k - 1 + n) % n)];
        const Vec2 next = loop[static_cast<std::size_t>((k + 1) % n)];
        ContactPoint cp;
        cp.x = loop[static_cast<std::size_t>(k)];
        cp.dl = 0.5 * (norm(cp.x - prev) + norm(next - cp.x));
        cp.K = circumcurvature(loop[static_cast<std::size_t>((k - s + n) % n)], cp.x,
                               loop[static_cast<std::size_t>((k + s) % n)]);
        const Vec2 g = v.gradient(cp.x);
        cp.grad_v = norm(g);
        cp.normal = cp.grad_v > 0.0 ? (-1.0 / cp.grad_v) * g : Vec2{0.0, 0.0};
        cp.contact = distance_to_hull(hull, cp.x) <= cs.hull_tol;
        total += cp.dl;
        if (cp.contact) {
          on_hull += cp.dl;
          lv.turning += cp.K * cp.dl;
        }
        lv.points.push_back(cp);
      }
    }
    lv.contact_fraction = total > 0.0 ? on_hull / total : 0.0;
  });
  return cs;
}

EuclideanReport maxprin_euclidean(const ContactSet& cs, int grid, double tol) {
  EuclideanReport rep;
  rep.grid = grid;
  rep.levels = static_cast<int>(cs.levels.size());
  rep.lhs = cs.M - cs.sup_boundary_v;
  const double dtau = cs.inf_boundary_f / rep.levels;
  for (const auto& lv : cs.levels) {
    rep.integral += lv.tau * lv.turning * dtau;
    rep.min_contact_fraction = std::min(rep.min_contact_fraction, lv.contact_fraction);
  }
  rep.target = kPi * cs.inf_boundary_f * cs.inf_boundary_f;
  rep.ratio = rep.integral / rep.target;
  // Covering: the images τ n of contact points fill a polar grid of B_{(1-ε) inf f}.
  constexpr int kRadial = 16;
  constexpr int kAngular = 32;
  constexpr double kEps = 0.05;
  const double rmax = (1.0 - kEps) * cs.inf_boundary_f;
  std::vector<char> hit(kRadial * kAngular, 0);
  for (const auto& lv : cs.levels) {
    if (lv.tau >= rmax) continue;
    const int ir = std::min(kRadial - 1, static_cast<int>(lv.tau / rmax * kRadial));
    for (const auto& cp : lv.points) {
      if (!cp.contact || cp.grad_v == 0.0) continue;
      double a = polar_angle(cp.normal);
      if (a < 0.0) a += kTwoPi;
      const int ia = std::min(kAngular - 1, static_cast<int>(a / kTwoPi * kAngular));
      hit[static_cast<std::size_t>(ir * kAngular + ia)] = 1;
    }
  }
  rep.covered_fraction = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / (kRadial * kAngular);
  rep.pass = rep.ratio >= 1.0 - tol && rep.covered_fraction == 1.0;
  return rep;
}

EuclideanReport maxprin_euclidean(const ScalarFieldOnBody& v, int levels, int grid, double tol) {
  if (v.kind == ScalarFieldOnBody::Kind::constant) {
    EuclideanReport rep;
    rep.grid = grid;
    rep.degenerate = true;
    rep.pass = true;
    return rep;
  }
  return maxprin_euclidean(contact_set(v, levels, grid), grid, tol);
}

// ---------------------------------------------------------------------------
// Sector

SectorField::Value SectorField::eval(double r, double theta) const {
  switch (kind) {
    case Kind::constant: return {c, 0.0, 0.0};
    case Kind::bump: {
      const double u = (theta - bump_center) / bump_width;
      if (std::abs(u) >= 0.5) return {0.0, 0.0, 0.0};
      const double a = 2.0 * kPi * u;  // cos²(πu) = (1 + cos a) / 2
      const double b = 0.5 * c * (1.0 + std::cos(a));
      const double k = 2.0 * kPi / bump_width;
      const double b2 = -0.5 * c * k * k * std::cos(a);
      return {(R2 - r) * b, -b, (R2 - r) * b2};
    }
    case Kind::increasing: {
      const double mid = 0.5 * (theta_a + theta_b);
      const double g = 1.0 + 0.2 * std::cos(theta - mid);
      return {c * r * g, c * g, -0.2 * c * r * std::cos(theta - mid)};
    }
  }
  return {};
}

std::string SectorField::name() const {
  switch (kind) {
    case Kind::constant: return "constant";
    case Kind::bump: return "bump";
    case Kind::increasing: return "increasing";
  }
  return "unknown";
}

SectorReport maxprin_sector(const SectorField& f, int n_r, int n_theta, double tol) {
  if (!(f.theta_a > 0.0 && f.theta_b < kPi && f.theta_a < f.theta_b)) {
    fail(ErrorKind::geometry, "Q must lie strictly inside the upper half circle");
  }
  const double width = f.theta_b - f.theta_a;
  if (width >= 0.5 * kPi) fail(ErrorKind::geometry, "Q wider than a quarter turn leaves condition b) empty");
  if (!(f.R1 > 0.0 && f.R2 > f.R1)) fail(ErrorKind::invalid_argument, "need 0 < R1 < R2");
  if (n_r < 4 || n_theta < 4) fail(ErrorKind::invalid_argument, "sector grid is too coarse");
  SectorReport rep;
  const double dr = (f.R2 - f.R1) / n_r;
  const double dt = width / n_theta;
  // Sup over Ω and over the parabolic boundary on the node lattice.
  rep.sup_omega = -std::numeric_limits<double>::infinity();
  rep.sup_parabolic = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n_r; ++i) {
    const double r = f.R1 + dr * i;
    for (int j = 0; j <= n_theta; ++j) {
      const double th = f.theta_a + dt * j;
      const double v = f.eval(r, th).f;
      rep.sup_omega = std::max(rep.sup_omega, v);
      if (i == n_r || j == 0 || j == n_theta) rep.sup_parabolic = std::max(rep.sup_parabolic, v);
    }
  }
  if (rep.sup_parabolic < 0.0) fail(ErrorKind::invalid_argument, "sup over the parabolic boundary must be nonnegative");
  // J by the midpoint rule over Γ_f.
  for (int i = 0; i < n_r; ++i) {
    const double r = f.R1 + dr * (i + 0.5);
    for (int j = 0; j < n_theta; ++j) {
      const double th = f.theta_a + dt * (j + 0.5);
      const auto v = f.eval(r, th);
      const double w = v.f + v.f_thetatheta;
      if (v.f_r <= 0.0 && w <= 0.0) {
        rep.J += std::abs(v.f_r * w) * dr * dt;
        ++rep.gamma_nodes;
        if (i % 4 == 0 && j % 4 == 0) rep.gamma_points.emplace_back(r, th);
      }
    }
  }
  rep.C_Q = 1.0 / std::cos(width);
  rep.C1 = rep.C_Q;
  rep.C2 = std::sqrt(2.0 / width);
  const double M = rep.sup_omega;
  const double lo = rep.C_Q * rep.sup_parabolic;
  rep.area_B = M > lo ? 0.5 * width * (M * M - lo * lo) : 0.0;
  rep.bound = rep.C1 * rep.sup_parabolic + rep.C2 * std::sqrt(rep.J);
  rep.covering_ok = rep.area_B <= rep.J * (1.0 + tol);
  rep.bound_ok = M <= rep.bound + 1e-12 * std::max(1.0, std::abs(rep.bound));
  rep.pass = rep.covering_ok && rep.bound_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Sobolev

double sobolev_inverse_constant(double p, double R, double C) {
  return std::max(2.0 * R * std::pow(C, -p), 2.0 * std::pow(2.0 * p, p) * std::pow(R, p + 1.0));
}

SobolevReport sobolev_check(const TransportMap& map, double p, int radial_nodes) {
  const DensityField& rho1 = map.rho1();
  const auto* rp = std::get_if<RadialPower>(&rho1.kind());
  if (rp == nullptr || !rho1.domain().is_ball() || std::abs(rp->alpha + (rho1.dim() - 1)) > 1e-12) {
    fail(ErrorKind::wrong_target_density, "sobolev check needs rho1 = C / r^{d-1} on a ball, got " + rho1.kind_name());
  }
  if (!(p > 0.0)) fail(ErrorKind::invalid_argument, "p must be positive");
  if (radial_nodes != 64 && radial_nodes != 128) fail(ErrorKind::invalid_argument, "radial_nodes must be 64 or 128");
  const SupportField& f = map.field();
  const int n = f.n_theta;
  const double dth = f.dtheta();
  SobolevReport rep;
  rep.p = p;

  const auto nodes = radial_nodes == 64 ? std::vector<double>(boost::math::quadrature::gauss<double, 64>::abscissa().begin(),
                                                              boost::math::quadrature::gauss<double, 64>::abscissa().end())
                                        : std::vector<double>(boost::math::quadrature::gauss<double, 128>::abscissa().begin(),
                                                              boost::math::quadrature::gauss<double, 128>::abscissa().end());
  const auto weights = radial_nodes == 64 ? std::vector<double>(boost::math::quadrature::gauss<double, 64>::weights().begin(),
                                                                boost::math::quadrature::gauss<double, 64>::weights().end())
                                          : std::vector<double>(boost::math::quadrature::gauss<double, 128>::weights().begin(),
                                                                boost::math::quadrature::gauss<double, 128>::weights().end());
  // Boost stores the nonnegative half of a symmetric rule.
  std::vector<std::pair<double, double>> rule;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    rule.emplace_back(nodes[i], weights[i]);
    if (nodes[i] != 0.0) rule.emplace_back(-nodes[i], weights[i]);
  }
  std::sort(rule.begin(), rule.end());
  const double a = f.r_stop;
  const double b = f.R;
  std::vector<double> lhs_terms(rule.size()), rhs1_terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) {
    const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule[i].first;
    const double w = 0.5 * (b - a) * rule[i].second;
    std::vector<std::complex<double>> c;
    std::vector<std::complex<double>> dc;
    map.interpolant().coefficients(r, c, &dc);
    const double nu = eval_radial(rho1, r) * r;
    double sl = 0.0;
    double s1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double th = dth * j;
      const TrigValue v = eval_trig(c, n, th);
      const double H_r = eval_trig(dc, n, th).f;
      sl += std::pow(H_r, -(p + 1.0));
      const Vec2 x = v.f * unit_normal(th) + v.df * unit_tangent(th);
      const double rho0 = eval_unchecked(map.rho0(), x);
      s1 += std::pow(norm(map.rho0().gradient(x)) / rho0, p + 1.0);
    }
    lhs_terms[i] = w * nu * sl * dth;
    rhs1_terms[i] = w * nu * s1 * dth;
  });
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rep.lhs += lhs_terms[i];
    rep.rhs1 += rhs1_terms[i];
  }
  // Boundary terms over ∂A = row 0, ds = (h + h_θθ) dθ.
  const ConvexBody A(std::vector<double>(f.row(0).begin(), f.row(0).end()));
  std::vector<std::complex<double>> c;
  std::vector<std::complex<double>> dc;
  map.interpolant().coefficients(f.R, c, &dc);
  for (int j = 0; j < n; ++j) {
    const double rad = A.radius()[static_cast<std::size_t>(j)];
    const double rho0 = eval_unchecked(map.rho0(), boundary_point(A, j));
    rep.rhs2 += std::pow(rad, p) * std::pow(rho0, p + 1.0) * rad * dth;
    const double grad = 1.0 / eval_trig(dc, n, A.theta(j)).f;
    rep.boundary_term += std::pow(grad, p) * rho0 * rad * dth;
  }
  const double C = rho1.Z();
  rep.c_hat = rep.lhs / (rep.rhs1 + rep.rhs2);
  rep.inv_C_impl = sobolev_inverse_constant(p, f.R, C);
  rep.two_term_bound = 2.0 * f.R * std::pow(C, -p) * rep.rhs2 + 2.0 * std::pow(2.0 * p, p) * std::pow(f.R, p + 1.0) * rep.rhs1;
  rep.pass = rep.c_hat <= rep.inv_C_impl;
  return rep;
}

// ---------------------------------------------------------------------------
// Gauss map

GaussMapReport gaussmap_pushforward(const ConvexBody& body, const std::function<double(double)>& f) {
  const int n = body.n_theta();
  const double dth = body.dtheta();
  GaussMapReport rep;
  std::vector<double> K(static_cast<std::size_t>(n));
  std::vector<Vec2> x(static_cast<std::size_t>(n));
  double scale = 0.0;
  for (int j = 0; j < n; ++j) {
    K[static_cast<std::size_t>(j)] = curvature_from_support(body, j);
    x[static_cast<std::size_t>(j)] = boundary_point(body, j);
    const double fj = f(body.theta(j));
    rep.sphere_integral += fj * dth;
    scale += std::abs(fj) * dth;
  }
  // Trapezoid along the boundary polygon: chord length times mean of f(n) K.
  for (int j = 0; j < n; ++j) {
    const int k = (j + 1) % n;
    const double fa = f(body.theta(j)) * K[static_cast<std::size_t>(j)];
    const double fb = f(body.theta(k)) * K[static_cast<std::size_t>(k)];
    rep.boundary_integral += 0.5 * (fa + fb) * norm(x[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(j)]);
  }
  rep.rel_error = scale > 0.0 ? std::abs(rep.boundary_integral - rep.sphere_integral) / scale : 0.0;
  rep.tol = 10.0 * dth * dth;
  rep.pass = rep.rel_error <= rep.tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Isoperimetric

IsoReport isoperimetric_check(const ConvexBody& A, const IsoOptions& opts) {
  constexpr int d = 2;
  IsoReport rep;
  rep.area = area(A);
  rep.perimeter = perimeter(A);
  rep.R = std::sqrt(rep.area / kPi);
  rep.bound = rep.R / d * rep.perimeter;
  rep.bound_printed = rep.R / (d - 1) * rep.perimeter;
  rep.ratio = rep.bound / rep.area;

  const DensityField rho0 = normalize(DensityField(Domain::of_body(A), Uniform{}));
  const DensityField rho1 = normalize(DensityField(Domain::ball(rep.R), Uniform{}));
  GridSpec grid;
  grid.n_r = opts.n_r;
  grid.n_theta = A.n_theta();
  SolverOptions so;
  so.rule = A.rule();
  const TransportMap map(solve_2d(A, rho0, rho1, grid, so), rho0, rho1);

  // ∫_A div T = ∮ <T, n> ds with ds = (h + h_θθ) dθ.
  for (int j = 0; j < A.n_theta(); ++j) {
    const Vec2 xb = boundary_point(A, j);
    const auto lv = map.try_level(xb);
    const Vec2 T = lv ? lv->r * unit_normal(lv->theta) : forward(map, (1.0 - 1e-12) * xb);
    rep.divergence_flux += dot(T, unit_normal(A.theta(j))) * A.radius()[static_cast<std::size_t>(j)] * A.dtheta();
  }

  const auto xs = sample(rho0, static_cast<std::size_t>(4 * opts.samples), opts.seed);
  std::vector<double> dets;
  const double h = opts.jac_step * rep.R;
  for (const Vec2& x : xs) {
    if (static_cast<int>(dets.size()) >= opts.samples) break;
    bool ok = true;
    for (Vec2 e : {Vec2{h, 0.0}, Vec2{-h, 0.0}, Vec2{0.0, h}, Vec2{0.0, -h}}) ok = ok && map.try_level(x + e).has_value();
    if (!ok) continue;
    const Jacobian2 J = jacobian_matrix_fd(map, x, h);
    const double det = J.det();
    const double tr = J.trace();
    const double disc = tr * tr - 4.0 * det;
    const double min_re = disc >= 0.0 ? 0.5 * (tr - std::sqrt(disc)) : 0.5 * tr;
    if (!(min_re > 0.0) || !(det > 0.0) || tr - 2.0 * std::sqrt(det) < -1e-6) ++rep.amgm_violations;
    dets.push_back(det);
  }
  rep.amgm_samples = static_cast<int>(dets.size());
  if (!dets.empty()) {
    std::sort(dets.begin(), dets.end());
    const std::size_t m = dets.size();
    rep.jacobian_median = m % 2 == 1 ? dets[m / 2] : 0.5 * (dets[m / 2 - 1] + dets[m / 2]);
  }
  rep.pass = rep.ratio >= 1.0 - opts.tol_iso && rep.amgm_violations == 0 && rep.amgm_samples > 0 &&
             std::abs(rep.jacobian_median - 1.0) <= 0.01;
  return rep;
}

}  // namespace gtrans
