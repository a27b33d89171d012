#include "gtrans/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "gtrans/error.hpp"
#include "gtrans/parallel.hpp"
#include "gtrans/rng.hpp"

namespace gtrans {

TransportMap::TransportMap(SupportField field, DensityField rho0, DensityField rho1)
    : field_(std::make_shared<const SupportField>(std::move(field))),
      rho0_(std::move(rho0)),
      rho1_(std::move(rho1)) {
  if (field_->d != 2) fail(ErrorKind::invalid_argument, "transport maps are planar");
  if (!rho0_.normalized() || !rho1_.normalized()) fail(ErrorKind::invalid_argument, "densities must be normalized");
  if (!field_->digest.empty() && field_->digest != digest(rho0_) + "|" + digest(rho1_)) {
    fail(ErrorKind::invalid_argument, "H-field was solved for different densities");
  }
  interp_ = std::make_shared<const FieldInterpolant>(*field_);
  normals_.resize(static_cast<std::size_t>(field_->n_theta));
  for (int j = 0; j < field_->n_theta; ++j) normals_[static_cast<std::size_t>(j)] = unit_normal(field_->theta(j));
}

double TransportMap::grid_gap(Vec2 x, int k) const {
  const auto row = field_->row(k);
  double g = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < row.size(); ++j) g = std::max(g, dot(x, normals_[j]) - row[j]);
  return g;
}

void TransportMap::interpolate_row(double r, std::vector<double>& out) const {
  const RowStencil st = row_stencil(*field_, r);
  const int n = field_->n_theta;
  out.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < 4; ++i) {
    const auto row = field_->row(st.base + i);
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += st.w[i] * row[static_cast<std::size_t>(j)];
  }
}

namespace {

// Newton refinement of argmax_θ (<x, n(θ)> - H(θ)) for the interpolated row c.
double refine_normal(const std::vector<std::complex<double>>& c, int n, Vec2 x, double theta, double dt) {
  for (int it = 0; it < 8; ++it) {
    const TrigValue v = eval_trig(c, n, theta);
    const double d1 = dot(x, unit_tangent(theta)) - v.df;
    const double d2 = -dot(x, unit_normal(theta)) - v.d2f;
    if (!(d2 < 0.0)) break;
    const double step = std::clamp(-d1 / d2, -dt, dt);
    theta += step;
    if (std::abs(step) < 1e-15) break;
  }
  return theta;
}

}  // namespace

int TransportMap::grid_argmax(Vec2 x, std::span<const double> H) const {
  const int n = field_->n_theta;
  int best = 0;
  double gbest = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double g = dot(x, normals_[static_cast<std::size_t>(j)]) - H[static_cast<std::size_t>(j)];
    if (g > gbest) {
      gbest = g;
      best = j;
    }
  }
  // A second near-maximizer far from the first means the normal is not unique.
  const double slack = 1e-9 * std::max(1.0, std::abs(gbest));
  for (int j = 0; j < n; ++j) {
    int sep = std::abs(j - best);
    sep = std::min(sep, n - sep);
    if (sep > 2 && dot(x, normals_[static_cast<std::size_t>(j)]) - H[static_cast<std::size_t>(j)] >= gbest - slack) {
      fail(ErrorKind::ambiguous_normal, "supporting normal is not unique");
    }
  }
  return best;
}

TransportMap::Level TransportMap::support_gap_at(Vec2 x, double r) const {
  const SupportField& f = *field_;
  std::vector<double> Hr;
  interpolate_row(r, Hr);
  std::vector<std::complex<double>> c;
  interp_->coefficients(r, c, nullptr);
  const double theta = refine_normal(c, f.n_theta, x, f.theta(grid_argmax(x, Hr)), f.dtheta());
  return {dot(x, unit_normal(theta)) - eval_trig(c, f.n_theta, theta).f, theta};
}

std::optional<TransportMap::Level> TransportMap::try_level(Vec2 x) const {
  const SupportField& f = *field_;
  const double tol = 1e-10 * f.at(0, 0);
  if (grid_gap(x, 0) > tol || grid_gap(x, f.n_r) <= 0.0) return std::nullopt;
  // Bisection over rows: gap(row lo) <= 0 < gap(row hi).
  int lo = 0;
  int hi = f.n_r;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (grid_gap(x, mid) <= 0.0) lo = mid; else hi = mid;
  }
  const double g0 = grid_gap(x, lo);
  const double g1 = grid_gap(x, hi);
  double r = f.r(lo) + (f.r(hi) - f.r(lo)) * (g0 / (g0 - g1));
  double theta = f.theta(grid_argmax(x, f.row(lo)));
  // Newton in r on the interpolated gap; by the envelope theorem its r-derivative is -H_r(r, θ*).
  const double r_min = f.r(std::min(hi + 1, f.n_r));
  const double r_max = f.r(std::max(lo - 1, 0));
  std::vector<std::complex<double>> c;
  std::vector<std::complex<double>> dc;
  for (int it = 0; it < 30; ++it) {
    interp_->coefficients(r, c, &dc);
    theta = refine_normal(c, f.n_theta, x, theta, f.dtheta());
    const double g = dot(x, unit_normal(theta)) - eval_trig(c, f.n_theta, theta).f;
    const double H_r = eval_trig(dc, f.n_theta, theta).f;
    if (!(H_r > 0.0)) break;
    const double next = std::clamp(r + g / H_r, r_min, r_max);
    const double step = next - r;
    r = next;
    if (std::abs(step) <= 1e-15 * f.R) break;
  }
  r = std::clamp(r, f.r_stop, f.R);
  interp_->coefficients(r, c, nullptr);
  return Level{r, refine_normal(c, f.n_theta, x, theta, f.dtheta())};
}

TransportMap::Level TransportMap::level(Vec2 x) const {
  auto lv = try_level(x);
  if (!lv) fail(ErrorKind::out_of_range, "point is outside A_R or inside A_{r_stop}");
  return *lv;
}

double phi(const TransportMap& map, Vec2 x) { return map.level(x).r; }

NormalGrad normal_and_grad(const TransportMap& map, Vec2 x) {
  const auto lv = map.level(x);
  const auto v = map.interpolant().at(lv.r, lv.theta);
  return {unit_normal(lv.theta), 1.0 / v.H_r};
}

Vec2 forward(const TransportMap& map, Vec2 x) {
  const auto lv = map.level(x);
  return lv.r * unit_normal(lv.theta);
}

Vec2 inverse(const TransportMap& map, Vec2 y) {
  const SupportField& f = map.field();
  const double r = norm(y);
  const double tol = 1e-12 * f.R;
  if (r < f.r_stop - tol || r > f.R + tol) fail(ErrorKind::out_of_annulus, "point outside [r_stop, R]");
  const double theta = polar_angle(y);
  const auto v = map.interpolant().at(std::clamp(r, f.r_stop, f.R), theta);
  return v.H * unit_normal(theta) + v.H_theta * unit_tangent(theta);
}

namespace {

struct LocalGeometry {
  TransportMap::Level level;
  FieldInterpolant::Value value;
};

LocalGeometry local_geometry(const TransportMap& map, Vec2 x) {
  const auto lv = map.level(x);
  const auto v = map.interpolant().at(lv.r, lv.theta);
  const auto row = map.field().row(0);
  const double floor = 1e-6 * *std::max_element(row.begin(), row.end());
  if (v.H + v.H_thetatheta <= floor) fail(ErrorKind::degenerate_curvature, "H + H_thetatheta below floor");
  return {lv, v};
}

}  // namespace

double jacobian_predicted(const TransportMap& map, Vec2 x) {
  const auto g = local_geometry(map, x);
  return g.level.r / (g.value.H_r * (g.value.H + g.value.H_thetatheta));
}

double cov_residual(const TransportMap& map, Vec2 x) {
  const auto g = local_geometry(map, x);
  const double K = 1.0 / (g.value.H + g.value.H_thetatheta);
  const double grad = 1.0 / g.value.H_r;
  const double r = g.level.r;
  const double rho0 = eval_unchecked(map.rho0(), x);
  const double rhs = K * grad * r * eval_unchecked(map.rho1(), r * unit_normal(g.level.theta));
  return std::abs(rho0 - rhs) / rho0;
}

Jacobian2 jacobian_matrix_fd(const TransportMap& map, Vec2 x, double step) {
  const Vec2 ex{step, 0.0};
  const Vec2 ey{0.0, step};
  const Vec2 dx = (forward(map, x + ex) - forward(map, x - ex)) / (2.0 * step);
  const Vec2 dy = (forward(map, x + ey) - forward(map, x - ey)) / (2.0 * step);
  return {dx.x, dy.x, dx.y, dy.y};
}

double jacobian_fd(const TransportMap& map, Vec2 x, double step) { return jacobian_matrix_fd(map, x, step).det(); }

namespace {

// Uniform-in-area deterministic points of the annulus [a, b].
std::vector<Vec2> annulus_points(double a, double b, int count, std::uint64_t seed) {
  CounterRng rng(seed, 0x5EEDull);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double s = std::sqrt(a * a + (b * b - a * a) * rng.uniform());
    out.push_back(s * unit_normal(kTwoPi * rng.uniform()));
  }
  return out;
}

}  // namespace

double roundtrip_error(const TransportMap& map, int count, std::uint64_t seed) {
  const SupportField& f = map.field();
  // Stay a row inside the ends so that φ never needs extrapolation.
  const auto pts = annulus_points(f.r(f.n_r - 1), f.r(1), count, seed);
  std::vector<double> err(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { err[i] = norm(forward(map, inverse(map, pts[i])) - pts[i]); });
  return err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
}

namespace {

// ∫_a^b |F_n(s) - G(s)| ds for the empirical CDF of sorted radii against a
// CDF tabulated on a fine uniform grid (linear between nodes).
double w1_against_table(const std::vector<double>& sorted, double a, double b, const std::vector<double>& G) {
  const std::size_t M = G.size() - 1;
  const double h = (b - a) / static_cast<double>(M);
  const double n = static_cast<double>(sorted.size());
  auto G_at = [&](double s) {
    const double t = std::clamp((s - a) / h, 0.0, static_cast<double>(M));
    const std::size_t i = std::min(static_cast<std::size_t>(t), M - 1);
    return G[i] + (G[i + 1] - G[i]) * (t - static_cast<double>(i));
  };
  // |c - G| on [s0, s1] with G linear there.
  auto piece = [&](double c, double s0, double s1) {
    if (s1 <= s0) return 0.0;
    const double e0 = c - G_at(s0);
    const double e1 = c - G_at(s1);
    if ((e0 >= 0.0) == (e1 >= 0.0)) return 0.5 * (std::abs(e0) + std::abs(e1)) * (s1 - s0);
    const double frac = e0 / (e0 - e1);
    return 0.5 * (std::abs(e0) * frac + std::abs(e1) * (1.0 - frac)) * (s1 - s0);
  };
  double total = 0.0;
  std::size_t k = 0;  // samples at or below the current position
  double pos = a;
  std::size_t node = 1;
  while (pos < b) {
    const double next_node = node <= M ? a + h * static_cast<double>(node) : b;
    const double next_sample = k < sorted.size() ? sorted[k] : b;
    const double next = std::min({next_node, next_sample, b});
    total += piece(static_cast<double>(k) / n, pos, next);
    pos = next;
    if (k < sorted.size() && sorted[k] <= pos) ++k;
    else if (next_node <= pos) ++node;
    if (pos >= b) break;
  }
  return total;
}

}  // namespace

PushforwardReport pushforward_test(const TransportMap& map, std::size_t n, std::uint64_t seed, int bins) {
  if (bins < 2) fail(ErrorKind::invalid_argument, "need at least two angle bins");
  const SupportField& f = map.field();
  PushforwardReport rep;
  rep.bins = bins;
  const double eps = 1e-6 * f.R;
  rep.annulus_lo = f.r_stop + eps;
  rep.annulus_hi = f.R - eps;
  const auto xs = sample(map.rho0(), n, seed);
  std::vector<Vec2> ys(xs.size());
  std::vector<char> keep(xs.size(), 0);
  parallel_for(xs.size(), [&](std::size_t i) {
    const auto lv = map.try_level(xs[i]);
    if (lv && lv->r >= rep.annulus_lo && lv->r <= rep.annulus_hi) {
      ys[i] = lv->r * unit_normal(lv->theta);
      keep[i] = 1;
    }
  });
  std::vector<double> radii;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!keep[i]) continue;
    radii.push_back(norm(ys[i]));
    double ang = polar_angle(ys[i]);
    if (ang < 0.0) ang += kTwoPi;
    auto b = static_cast<int>(ang / kTwoPi * bins);
    counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1;
  }
  rep.n_used = radii.size();
  if (rep.n_used == 0) fail(ErrorKind::invalid_argument, "no samples landed in the annulus");
  std::sort(radii.begin(), radii.end());

  const double a = rep.annulus_lo;
  const double b = rep.annulus_hi;
  const double mass = sector_mass(map.rho1(), a, b, 0.0, kTwoPi);
  constexpr std::size_t kTable = 4096;
  std::vector<double> G(kTable + 1, 0.0);
  for (std::size_t i = 1; i <= kTable; ++i) {
    const double s0 = a + (b - a) * static_cast<double>(i - 1) / kTable;
    const double s1 = a + (b - a) * static_cast<double>(i) / kTable;
    G[i] = G[i - 1] + sector_mass(map.rho1(), s0, s1, 0.0, kTwoPi) / mass;
  }
  rep.radial_W1 = w1_against_table(radii, a, b, G);

  double chisq = 0.0;
  const double nu = static_cast<double>(rep.n_used);
  for (int i = 0; i < bins; ++i) {
    const double p = sector_mass(map.rho1(), a, b, kTwoPi * i / bins, kTwoPi * (i + 1) / bins) / mass;
    const double expected = nu * p;
    const double diff = static_cast<double>(counts[static_cast<std::size_t>(i)]) - expected;
    chisq += diff * diff / expected;
  }
  rep.angular_chisq = chisq;
  const boost::math::chi_squared dist(bins - 1);
  rep.angular_chisq_pvalue = boost::math::cdf(boost::math::complement(dist, chisq));
  rep.grid_error = roundtrip_error(map, 256, seed);
  rep.W1_bound = 1.63 * (b - a) / std::sqrt(nu) + rep.grid_error;
  rep.pass = rep.radial_W1 <= rep.W1_bound && rep.angular_chisq_pvalue >= 0.01;
  return rep;
}

}  // namespace gtrans
