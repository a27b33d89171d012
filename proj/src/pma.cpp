#include "gtrans/pma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gtrans/error.hpp"

namespace gtrans {
namespace {

// Real-axis stability interval of classical RK4.
constexpr double kRk4Stability = 2.785;

struct Rhs {
  std::vector<double> dH;
  double min_radius = 0.0;
  double max_diffusivity = 0.0;  // max P / (ρ0 w²): coefficient of H_θθ in the linearization
  long clamped = 0;
};

class Marcher {
 public:
  Marcher(const ConvexBody& A, const DensityField& rho0, const DensityField& rho1, const SolverOptions& opts)
      : A_(A), rho0_(rho0), rho1_(rho1), opts_(opts), n_(A.n_theta()) {
    floor_det_ = A.floor_det();
    normals_.resize(static_cast<std::size_t>(n_));
    tangents_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      normals_[static_cast<std::size_t>(j)] = unit_normal(A.theta(j));
      tangents_[static_cast<std::size_t>(j)] = unit_tangent(A.theta(j));
    }
    d1_.resize(static_cast<std::size_t>(n_));
    d2_.resize(static_cast<std::size_t>(n_));
    const double dt = A.dtheta();
    lambda_max_ = opts_.rule == DiffRule::spectral ? 0.25 * n_ * n_ : 2.0 / (1.0 - std::cos(dt));
  }

  double floor_det() const { return floor_det_; }
  double lambda_max() const { return lambda_max_; }

  Rhs eval(double r, std::span<const double> H) {
    periodic_derivatives(H, d1_, d2_, opts_.rule);
    Rhs out;
    out.dH.resize(static_cast<std::size_t>(n_));
    out.min_radius = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_; ++j) {
      const auto i = static_cast<std::size_t>(j);
      double w = H[i] + d2_[i];
      out.min_radius = std::min(out.min_radius, w);
      if (w < floor_det_) {
        w = floor_det_;
        ++out.clamped;
      }
      const Vec2 x = H[i] * normals_[i] + d1_[i] * tangents_[i];
      const double rho0 = eval_unchecked(rho0_, x);
      if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
        fail(ErrorKind::domain_escape, "source density vanishes at the inverse image; T^-1 left A");
      }
      const double P = eval_unchecked(rho1_, r * normals_[i]) * r;
      out.dH[i] = P / (rho0 * w);
      out.max_diffusivity = std::max(out.max_diffusivity, out.dH[i] / w);
    }
    if (out.clamped > opts_.frac_degenerate * n_) {
      fail(ErrorKind::convexity_loss, "H + H_thetatheta fell below floor_det at " + std::to_string(out.clamped) +
                                          " of " + std::to_string(n_) + " nodes at r = " + std::to_string(r));
    }
    return out;
  }

  // Max violation of the body's support half-planes by T⁻¹ images of a row.
  double escape(std::span<const double> H) {
    periodic_derivatives(H, d1_, {}, opts_.rule);
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_; ++j) {
      const auto i = static_cast<std::size_t>(j);
      worst = std::max(worst, support_gap(A_, H[i] * normals_[i] + d1_[i] * tangents_[i]));
    }
    return worst;
  }

 private:
  const ConvexBody& A_;
  const DensityField& rho0_;
  const DensityField& rho1_;
  SolverOptions opts_;
  int n_;
  double floor_det_ = 0.0;
  double lambda_max_ = 0.0;
  std::vector<Vec2> normals_;
  std::vector<Vec2> tangents_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

struct StepResult {
  bool ok = true;
  long clamped = 0;
  double min_radius = std::numeric_limits<double>::infinity();
};

// One RK4 step of signed size h (h < 0 marches inward).
StepResult rk4_step(Marcher& m, double r, double h, std::vector<double>& H, double halving_floor) {
  StepResult res;
  const std::size_t n = H.size();
  std::vector<double> tmp(n);
  auto note = [&](const Rhs& k) {
    res.clamped += k.clamped;
    res.min_radius = std::min(res.min_radius, k.min_radius);
    if (k.min_radius < halving_floor) res.ok = false;
  };
  const Rhs k1 = m.eval(r, H);
  note(k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = H[i] + 0.5 * h * k1.dH[i];
  const Rhs k2 = m.eval(r + 0.5 * h, tmp);
  note(k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = H[i] + 0.5 * h * k2.dH[i];
  const Rhs k3 = m.eval(r + 0.5 * h, tmp);
  note(k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = H[i] + h * k3.dH[i];
  const Rhs k4 = m.eval(r + h, tmp);
  note(k4);
  for (std::size_t i = 0; i < n; ++i) H[i] += h / 6.0 * (k1.dH[i] + 2.0 * k2.dH[i] + 2.0 * k3.dH[i] + k4.dH[i]);
  return res;
}

}  // namespace

SupportField solve_2d(const ConvexBody& A, const DensityField& rho0, const DensityField& rho1, const GridSpec& grid,
                      const SolverOptions& opts, SolveStats* stats) {
  if (A.n_theta() != grid.n_theta) fail(ErrorKind::invalid_argument, "body and grid disagree on n_theta");
  if (grid.n_r < 4) fail(ErrorKind::invalid_argument, "n_r must be at least 4");
  if (!rho0.normalized() || !rho1.normalized()) fail(ErrorKind::invalid_argument, "densities must be normalized");
  if (!rho1.domain().is_ball()) fail(ErrorKind::invalid_argument, "target density must live on a ball");
  if (rho0.dim() != 2 || rho1.dim() != 2) fail(ErrorKind::invalid_argument, "solve_2d is planar");
  const double R = rho1.domain().radius;
  const double r_stop = grid.r_stop > 0.0 ? grid.r_stop : 0.05 * R;
  if (!(r_stop > 0.0 && r_stop < R)) fail(ErrorKind::invalid_argument, "r_stop must lie in (0, R)");
  for (int j = 0; j < A.n_theta(); ++j) curvature_from_support(A, j);

  SupportField field;
  field.d = 2;
  field.R = R;
  field.r_stop = r_stop;
  field.n_r = grid.n_r;
  field.n_theta = grid.n_theta;
  field.digest = digest(rho0) + "|" + digest(rho1);
  field.H.resize(static_cast<std::size_t>(grid.n_r + 1) * grid.n_theta);

  Marcher marcher(A, rho0, rho1, opts);
  std::vector<double> H(A.h().begin(), A.h().end());
  std::copy(H.begin(), H.end(), field.H.begin());

  SolveStats local;
  local.min_radius = *std::min_element(A.radius().begin(), A.radius().end());
  const double dr = field.dr();
  const double escape_tol = 10.0 * A.tol_contain();
  const double halving_floor = 4.0 * marcher.floor_det();

  for (int k = 0; k < grid.n_r; ++k) {
    const double r0 = field.r(k);
    const Rhs probe = marcher.eval(r0, H);
    const double h_stable = opts.stability_safety * kRk4Stability / (probe.max_diffusivity * marcher.lambda_max());
    long m = std::max<long>(1, static_cast<long>(std::ceil(dr / h_stable)));
    const std::vector<double> start = H;
    for (int attempt = 0;; ++attempt) {
      H = start;
      bool ok = true;
      long clamped = 0;
      double min_radius = std::numeric_limits<double>::infinity();
      const double h = -dr / static_cast<double>(m);
      for (long s = 0; s < m; ++s) {
        const StepResult res = rk4_step(marcher, r0 + h * static_cast<double>(s), h, H, halving_floor);
        clamped += res.clamped;
        min_radius = std::min(min_radius, res.min_radius);
        ok = ok && res.ok;
      }
      if (ok || attempt >= opts.max_halvings) {
        local.substeps += m;
        local.clamp_count += clamped;
        local.min_radius = std::min(local.min_radius, min_radius);
        break;
      }
      ++local.halvings;
      m *= 2;
    }
    const auto row = static_cast<std::size_t>(k + 1) * grid.n_theta;
    std::copy(H.begin(), H.end(), field.H.begin() + static_cast<std::ptrdiff_t>(row));
    const double gap = marcher.escape(H);
    if (gap > escape_tol) {
      fail(ErrorKind::domain_escape, "T^-1 left A by " + std::to_string(gap) + " at r = " + std::to_string(field.r(k + 1)));
    }
  }
  if (stats != nullptr) *stats = local;
  return field;
}

namespace {

// Solves F(x) = target for nondecreasing F on [0, hi] with derivative dF.
template <class F, class DF>
double invert_monotone(F&& cdf, DF&& density, double target, double hi) {
  double lo = 0.0;
  double up = hi;
  double x = 0.5 * (lo + up);
  for (int it = 0; it < 200; ++it) {
    const double fx = cdf(x) - target;
    if (std::abs(fx) <= 1e-15) return x;
    if (fx < 0.0) lo = x; else up = x;
    if (up - lo <= 1e-16 * hi) return 0.5 * (lo + up);
    const double slope = density(x);
    double next = (slope > 0.0 && std::isfinite(slope)) ? x - fx / slope : 0.5 * (lo + up);
    if (!(next > lo && next < up)) next = 0.5 * (lo + up);
    x = next;
  }
  return x;
}

double ball_radius(const DensityField& f) {
  return f.domain().is_ball() ? f.domain().radius : f.domain().body->h()[0];
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

}  // namespace

RadialProfile::RadialProfile(DensityField rho0, DensityField rho1, int nodes)
    : rho0_(std::move(rho0)), rho1_(std::move(rho1)) {
  if (!rho0_.is_radial() || !rho1_.is_radial()) fail(ErrorKind::not_radial, "radial solve needs radial fields");
  if (rho0_.dim() != rho1_.dim()) fail(ErrorKind::invalid_argument, "fields disagree on dimension");
  if (nodes < 1024) fail(ErrorKind::invalid_argument, "radial profile needs at least 1024 nodes");
  s_max_ = ball_radius(rho0_);
  R_ = ball_radius(rho1_);
  s_.resize(static_cast<std::size_t>(nodes));
  q_.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    s_[static_cast<std::size_t>(i)] = s_max_ * i / (nodes - 1);
    q_[static_cast<std::size_t>(i)] = q(s_[static_cast<std::size_t>(i)]);
  }
}

double RadialProfile::q(double s) const {
  const double target = radial_cdf(rho0_, std::clamp(s, 0.0, s_max_));
  const double area = sphere_area(d());
  return invert_monotone([&](double x) { return radial_cdf(rho1_, x); },
                         [&](double x) { return area * std::pow(x, d() - 1) * eval_radial(rho1_, x); }, target, R_);
}

double RadialProfile::q_inv(double r) const {
  const double target = radial_cdf(rho1_, std::clamp(r, 0.0, R_));
  const double area = sphere_area(d());
  return invert_monotone([&](double x) { return radial_cdf(rho0_, x); },
                         [&](double x) { return area * std::pow(x, d() - 1) * eval_radial(rho0_, x); }, target,
                         s_max_);
}

double RadialProfile::max_cdf_mismatch() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    worst = std::max(worst, std::abs(radial_cdf(rho1_, q_[i]) - radial_cdf(rho0_, s_[i])));
  }
  return worst;
}

RadialProfile solve_radial(int d, const DensityField& rho0, const DensityField& rho1) {
  if (rho0.dim() != d || rho1.dim() != d) fail(ErrorKind::invalid_argument, "field dimension differs from d");
  return RadialProfile(rho0, rho1);
}

std::vector<double> march_radial(const DensityField& rho0, const DensityField& rho1, int n_r, double r_stop) {
  if (!rho0.is_radial() || !rho1.is_radial()) fail(ErrorKind::not_radial, "radial march needs radial fields");
  const int d = rho0.dim();
  const double R = ball_radius(rho1);
  auto rhs = [&](double r, double H) {
    return eval_radial(rho1, r) * std::pow(r, d - 1) / (eval_radial(rho0, H) * std::pow(H, d - 1));
  };
  std::vector<double> out(static_cast<std::size_t>(n_r + 1));
  double H = ball_radius(rho0);
  out[0] = H;
  const double h = -(R - r_stop) / n_r;
  for (int k = 0; k < n_r; ++k) {
    const double r = R + h * k;
    const double k1 = rhs(r, H);
    const double k2 = rhs(r + 0.5 * h, H + 0.5 * h * k1);
    const double k3 = rhs(r + 0.5 * h, H + 0.5 * h * k2);
    const double k4 = rhs(r + h, H + h * k3);
    H += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out[static_cast<std::size_t>(k + 1)] = H;
  }
  return out;
}

FieldInterpolant::FieldInterpolant(const SupportField& field) : field_(&field) {
  if (field.n_r < 3) fail(ErrorKind::invalid_argument, "interpolation needs n_r >= 3");
  rows_.reserve(static_cast<std::size_t>(field.n_r + 1));
  for (int k = 0; k <= field.n_r; ++k) rows_.push_back(fourier_coefficients(field.row(k)));
}

RowStencil row_stencil(const SupportField& f, double r) {
  const double t = (f.R - r) / f.dr();
  RowStencil s;
  s.base = std::clamp(static_cast<int>(std::floor(t)) - 1, 0, f.n_r - 3);
  const double x = t - s.base;
  s.w[0] = -(x - 1) * (x - 2) * (x - 3) / 6.0;
  s.w[1] = x * (x - 2) * (x - 3) / 2.0;
  s.w[2] = -x * (x - 1) * (x - 3) / 2.0;
  s.w[3] = x * (x - 1) * (x - 2) / 6.0;
  // dx/dr = -1/dr
  const double c = -1.0 / f.dr();
  s.dw[0] = -c * ((x - 2) * (x - 3) + (x - 1) * (x - 3) + (x - 1) * (x - 2)) / 6.0;
  s.dw[1] = c * ((x - 2) * (x - 3) + x * (x - 3) + x * (x - 2)) / 2.0;
  s.dw[2] = -c * ((x - 1) * (x - 3) + x * (x - 3) + x * (x - 1)) / 2.0;
  s.dw[3] = c * ((x - 1) * (x - 2) + x * (x - 2) + x * (x - 1)) / 6.0;
  return s;
}

void FieldInterpolant::coefficients(double r, std::vector<std::complex<double>>& c,
                                    std::vector<std::complex<double>>* dc) const {
  const RowStencil st = row_stencil(*field_, r);
  const std::size_t m = rows_[0].size();
  c.assign(m, {0.0, 0.0});
  if (dc != nullptr) dc->assign(m, {0.0, 0.0});
  for (int i = 0; i < 4; ++i) {
    const auto& row = rows_[static_cast<std::size_t>(st.base + i)];
    for (std::size_t q = 0; q < m; ++q) {
      c[q] += st.w[i] * row[q];
      if (dc != nullptr) (*dc)[q] += st.dw[i] * row[q];
    }
  }
}

FieldInterpolant::Value FieldInterpolant::at(double r, double theta) const {
  std::vector<std::complex<double>> c;
  std::vector<std::complex<double>> dc;
  coefficients(r, c, &dc);
  const TrigValue v = eval_trig(c, field_->n_theta, theta);
  const TrigValue vr = eval_trig(dc, field_->n_theta, theta);
  return {v.f, v.df, v.d2f, vr.f};
}

double chart_angle(double z) { return 1.5 * kPi + std::atan(z); }

std::vector<double> chart_u_from_H(const SupportField& field, std::span<const double> z) {
  const FieldInterpolant interp(field);
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(field.n_r + 1) * z.size());
  for (int k = 0; k <= field.n_r; ++k) {
    const auto coeffs = fourier_coefficients(field.row(k));
    for (double zi : z) {
      u.push_back(std::sqrt(1.0 + zi * zi) * eval_trig(coeffs, field.n_theta, chart_angle(zi)).f);
    }
  }
  return u;
}

namespace {

struct ChartDerivs {
  double u = 0.0;
  double u_z = 0.0;
  double u_zz = 0.0;
};

// Fourth-order finite differences of u(z) = sqrt(1 + z²) H(r, θ(z)) at fixed r.
ChartDerivs chart_fd(const std::vector<std::complex<double>>& c, int n_theta, double z) {
  const double dz = 2e-3 * std::max(1.0, std::abs(z));
  double u[5];
  for (int m = -2; m <= 2; ++m) {
    const double zm = z + m * dz;
    u[m + 2] = std::sqrt(1.0 + zm * zm) * eval_trig(c, n_theta, chart_angle(zm)).f;
  }
  ChartDerivs d;
  d.u = u[2];
  d.u_z = (u[0] - 8.0 * u[1] + 8.0 * u[3] - u[4]) / (12.0 * dz);
  d.u_zz = (-u[0] + 16.0 * u[1] - 30.0 * u[2] + 16.0 * u[3] - u[4]) / (12.0 * dz * dz);
  return d;
}

double row_floor(const SupportField& f) {
  const auto row = f.row(0);
  return 1e-6 * *std::max_element(row.begin(), row.end());
}

}  // namespace

double chart_identity_residual(const FieldInterpolant& interp, double z, double r) {
  const SupportField& f = interp.field();
  if (r < f.r_stop - 1e-12 || r > f.R + 1e-12) fail(ErrorKind::out_of_range, "radius outside [r_stop, R]");
  std::vector<std::complex<double>> c;
  interp.coefficients(r, c, nullptr);
  const TrigValue v = eval_trig(c, f.n_theta, chart_angle(z));
  const double w = v.f + v.d2f;
  if (w <= row_floor(f)) fail(ErrorKind::degenerate_curvature, "H + H_thetatheta below floor in chart residual");
  const ChartDerivs d = chart_fd(c, f.n_theta, z);
  return std::abs(w - std::pow(1.0 + z * z, 1.5) * d.u_zz) / w;
}

double ma1_residual(const FieldInterpolant& interp, const DensityField& rho0, const DensityField& rho1, double z,
                    double r) {
  const SupportField& f = interp.field();
  if (r < f.r_stop - 1e-12 || r > f.R + 1e-12) fail(ErrorKind::out_of_range, "radius outside [r_stop, R]");
  std::vector<std::complex<double>> c;
  std::vector<std::complex<double>> dc;
  interp.coefficients(r, c, &dc);
  const double theta = chart_angle(z);
  const TrigValue v = eval_trig(c, f.n_theta, theta);
  if (v.f + v.d2f <= row_floor(f)) fail(ErrorKind::degenerate_curvature, "H + H_thetatheta below floor in MA1 residual");
  const double s = std::sqrt(1.0 + z * z);
  const double u_r = s * eval_trig(dc, f.n_theta, theta).f;
  const ChartDerivs d = chart_fd(c, f.n_theta, z);
  const double lhs = u_r * d.u_zz;
  const Vec2 y = (r / s) * Vec2{z, -1.0};
  const Vec2 x{d.u_z, z * d.u_z - d.u};
  const double rhs = r / (1.0 + z * z) * eval_unchecked(rho1, y) / eval_unchecked(rho0, x);
  return std::abs(lhs - rhs) / std::abs(rhs);
}

void check_support_field(const SupportField& f) {
  if (f.n_r < 1 || !is_power_of_two(f.n_theta) || f.n_theta < 8) {
    fail(ErrorKind::invalid_argument, "H-field grid sizes are invalid");
  }
  if (f.H.size() != static_cast<std::size_t>(f.n_r + 1) * f.n_theta) {
    fail(ErrorKind::invalid_argument, "H-field has the wrong number of values");
  }
  if (!(f.r_stop > 0.0 && f.r_stop < f.R)) fail(ErrorKind::invalid_argument, "H-field radii are invalid");
  for (int k = 0; k <= f.n_r; ++k) {
    const auto row = f.row(k);
    const double scale = *std::max_element(row.begin(), row.end());
    for (double v : row) {
      if (!(v > 0.0)) fail(ErrorKind::origin_not_interior, "H-field row has nonpositive support value");
    }
    if (!is_discretely_convex(row, 1e-8 * scale)) {
      fail(ErrorKind::not_convex, "H-field row " + std::to_string(k) + " is not convex");
    }
    if (k > 0) {
      const auto prev = f.row(k - 1);
      for (int j = 0; j < f.n_theta; ++j) {
        if (!(row[static_cast<std::size_t>(j)] < prev[static_cast<std::size_t>(j)])) {
          fail(ErrorKind::invalid_argument, "H-field is not strictly decreasing inward at row " + std::to_string(k));
        }
      }
    }
  }
}

}  // namespace gtrans
