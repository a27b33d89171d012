#include "gtrans/fields.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "gtrans/error.hpp"
#include "gtrans/io.hpp"
#include "gtrans/parallel.hpp"
#include "gtrans/rng.hpp"

namespace gtrans {
namespace {

constexpr std::size_t kSampleChunk = 1024;

// Gauss-Legendre rule on [0, 1].
struct UnitRule {
  std::vector<double> x;
  std::vector<double> w;
};

const UnitRule& unit_rule(int nodes) {
  static const UnitRule rule64 = [] {
    using G = boost::math::quadrature::gauss<double, 64>;
    UnitRule r;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      const double a = G::abscissa()[i];
      const double wt = G::weights()[i];
      r.x.push_back(0.5 * (1.0 - a));
      r.w.push_back(0.5 * wt);
      r.x.push_back(0.5 * (1.0 + a));
      r.w.push_back(0.5 * wt);
    }
    return r;
  }();
  static const UnitRule rule16 = [] {
    using G = boost::math::quadrature::gauss<double, 16>;
    UnitRule r;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      const double a = G::abscissa()[i];
      const double wt = G::weights()[i];
      r.x.push_back(0.5 * (1.0 - a));
      r.w.push_back(0.5 * wt);
      r.x.push_back(0.5 * (1.0 + a));
      r.w.push_back(0.5 * wt);
    }
    return r;
  }();
  if (nodes == 16) return rule16;
  if (nodes == 64) return rule64;
  fail(ErrorKind::invalid_argument, "supported Gauss-Legendre orders are 16 and 64");
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

// Power of s carried analytically by the substitution u = s^beta.
double singular_exponent(const DensityKind& kind) {
  if (const auto* p = std::get_if<RadialPower>(&kind)) return p->alpha;
  return 0.0;
}

// Remaining smooth factor of the shape in polar coordinates.
double smooth_factor(const DensityKind& kind, double s, double theta) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AngularCosine>) {
          return 1.0 + k.amplitude * std::cos(k.frequency * theta);
        } else if constexpr (std::is_same_v<K, GaussianTrunc>) {
          return std::exp(-0.5 * s * s / (k.sigma * k.sigma));
        } else {
          return 1.0;
        }
      },
      kind);
}

double smooth_bound(const DensityKind& kind) {
  if (const auto* a = std::get_if<AngularCosine>(&kind)) return 1.0 + std::abs(a->amplitude);
  return 1.0;
}

// ∫_a^b smooth(s, θ) s^{alpha + d - 1} ds via u = s^beta, Gauss-Legendre in u.
double radial_integral(const DensityKind& kind, int d, double a, double b, double theta, int nodes) {
  const double beta = singular_exponent(kind) + d;
  const double ua = std::pow(a, beta);
  const double ub = std::pow(b, beta);
  const auto& rule = unit_rule(nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double u = ua + (ub - ua) * rule.x[i];
    sum += rule.w[i] * smooth_factor(kind, std::pow(u, 1.0 / beta), theta);
  }
  return sum * (ub - ua) / beta;
}

bool is_disk_body(const ConvexBody& body) {
  const auto h = body.h();
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  return *hi - *lo <= 1e-12 * *hi;
}

void validate(const DensityKind& kind, int dim) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, RadialPower>) {
          if (!(k.alpha > -dim)) {
            fail(ErrorKind::nonintegrable_singularity,
                 "radial_power exponent must exceed -d, got " + std::to_string(k.alpha));
          }
        } else if constexpr (std::is_same_v<K, AngularCosine>) {
          if (!(std::abs(k.amplitude) < 1.0)) fail(ErrorKind::invalid_argument, "angular_cosine needs |a| < 1");
          if (k.frequency < 0) fail(ErrorKind::invalid_argument, "angular_cosine frequency must be >= 0");
          if (dim != 2) fail(ErrorKind::invalid_argument, "angular_cosine is planar only");
        } else if constexpr (std::is_same_v<K, GaussianTrunc>) {
          if (!(k.sigma > 0.0)) fail(ErrorKind::invalid_argument, "gaussian_trunc needs sigma > 0");
        }
      },
      kind);
}

}  // namespace

Domain Domain::ball(double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::invalid_argument, "ball radius must be positive");
  Domain d;
  d.radius = radius;
  return d;
}

Domain Domain::of_body(ConvexBody body) {
  Domain d;
  d.radius = body.max_h() / std::cos(0.5 * body.dtheta());
  d.body = std::move(body);
  return d;
}

DensityField::DensityField(Domain domain, DensityKind kind, int dim)
    : domain_(std::move(domain)), kind_(kind), dim_(dim) {
  if (dim_ < 2) fail(ErrorKind::invalid_argument, "dimension must be >= 2");
  if (!domain_.is_ball() && dim_ != 2) fail(ErrorKind::invalid_argument, "body domains are planar");
}

bool DensityField::is_radial() const {
  if (std::holds_alternative<AngularCosine>(kind_)) return false;
  return domain_.is_ball() || is_disk_body(*domain_.body);
}

std::string DensityField::kind_name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Uniform>) return "uniform";
        else if constexpr (std::is_same_v<K, RadialPower>) return "radial_power";
        else if constexpr (std::is_same_v<K, AngularCosine>) return "angular_cosine";
        else return "gaussian_trunc";
      },
      kind_);
}

double DensityField::shape(Vec2 x) const {
  const double s = norm(x);
  double g = smooth_factor(kind_, s, polar_angle(x));
  const double alpha = singular_exponent(kind_);
  if (alpha != 0.0) g *= std::pow(s, alpha);
  return g;
}

double DensityField::radial_shape(double s) const {
  if (std::holds_alternative<AngularCosine>(kind_)) fail(ErrorKind::not_radial, "angular_cosine is not radial");
  double g = smooth_factor(kind_, s, 0.0);
  const double alpha = singular_exponent(kind_);
  if (alpha != 0.0) g *= std::pow(s, alpha);
  return g;
}

Vec2 DensityField::gradient(Vec2 x) const {
  const double r2 = dot(x, x);
  return std::visit(
      [&](const auto& k) -> Vec2 {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Uniform>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<K, RadialPower>) {
          return z_ * k.alpha * std::pow(r2, 0.5 * k.alpha - 1.0) * x;
        } else if constexpr (std::is_same_v<K, AngularCosine>) {
          const double t = polar_angle(x);
          const Vec2 grad_theta = Vec2{-x.y, x.x} / r2;
          return -z_ * k.amplitude * k.frequency * std::sin(k.frequency * t) * grad_theta;
        } else {
          const double g = std::exp(-0.5 * r2 / (k.sigma * k.sigma));
          return -z_ * g / (k.sigma * k.sigma) * x;
        }
      },
      kind_);
}

bool DensityField::domain_contains(Vec2 x) const {
  if (domain_.is_ball()) return norm(x) <= domain_.radius * (1.0 + 1e-10);
  return contains(*domain_.body, x);
}

double DensityField::extent(double omega) const {
  if (domain_.is_ball()) return domain_.radius;
  return radial_extent(*domain_.body, omega);
}

DensityField normalize(const DensityField& field, const QuadratureOptions& opts) {
  validate(field.kind_, field.dim_);
  DensityField out = field;
  const int d = field.dim_;
  double mass = 0.0;
  if (field.domain_.is_ball() && !std::holds_alternative<AngularCosine>(field.kind_)) {
    mass = sphere_area(d) * radial_integral(field.kind_, d, 0.0, field.domain_.radius, 0.0, opts.radial_nodes);
  } else {
    int n = opts.angular_nodes;
    if (n <= 0) n = field.domain_.is_ball() ? kDefaultNTheta : field.domain_.body->n_theta();
    for (int j = 0; j < n; ++j) {
      const double omega = kTwoPi * j / n;
      mass += radial_integral(field.kind_, d, 0.0, field.extent(omega), omega, opts.radial_nodes);
    }
    mass *= kTwoPi / n;
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorKind::invalid_argument, "density has no finite positive mass");
  out.z_ = 1.0 / mass;
  return out;
}

double total_mass(const DensityField& field, const QuadratureOptions& opts) {
  // Independent of the normalization path: trapezoid in angle everywhere.
  int n = opts.angular_nodes;
  if (n <= 0) n = field.domain().is_ball() ? kDefaultNTheta : field.domain().body->n_theta();
  double mass = 0.0;
  for (int j = 0; j < n; ++j) {
    const double omega = kTwoPi * j / n;
    mass += radial_integral(field.kind(), 2, 0.0, field.extent(omega), omega, opts.radial_nodes);
  }
  return field.Z() * mass * kTwoPi / n;
}

double eval_unchecked(const DensityField& field, Vec2 x) { return field.Z() * field.shape(x); }

double eval(const DensityField& field, Vec2 x) {
  if (!field.domain_contains(x)) fail(ErrorKind::out_of_domain, "point outside the density's domain");
  return eval_unchecked(field, x);
}

double eval_radial(const DensityField& field, double s) { return field.Z() * field.radial_shape(s); }

double radial_cdf(const DensityField& field, double s) {
  if (!field.is_radial()) fail(ErrorKind::not_radial, "radial_cdf needs a radially symmetric field on a ball or disk");
  const double R = field.domain().is_ball() ? field.domain().radius : field.domain().body->h()[0];
  if (s < 0.0 || s > R * (1.0 + 1e-12)) fail(ErrorKind::invalid_argument, "radius outside [0, R]");
  s = std::min(s, R);
  if (s == 0.0) return 0.0;
  return field.Z() * sphere_area(field.dim()) * radial_integral(field.kind(), field.dim(), 0.0, s, 0.0, 64);
}

double sector_mass(const DensityField& field, double a, double b, double theta0, double theta1) {
  if (!field.domain().is_ball() || field.dim() != 2) {
    fail(ErrorKind::invalid_argument, "sector_mass needs a planar field on a ball");
  }
  if (b <= a || theta1 <= theta0) return 0.0;
  if (!std::holds_alternative<AngularCosine>(field.kind())) {
    return field.Z() * (theta1 - theta0) * radial_integral(field.kind(), 2, a, b, 0.0, 64);
  }
  const auto& rule = unit_rule(16);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double t = theta0 + (theta1 - theta0) * rule.x[i];
    sum += rule.w[i] * radial_integral(field.kind(), 2, a, b, t, 64);
  }
  return field.Z() * sum * (theta1 - theta0);
}

std::vector<Vec2> sample(const DensityField& field, std::size_t n, std::uint64_t seed, std::uint64_t stream_base) {
  if (!field.normalized()) fail(ErrorKind::invalid_argument, "sample needs a normalized field");
  if (field.dim() != 2) fail(ErrorKind::invalid_argument, "sampling is planar only");
  std::vector<Vec2> out(n);
  const double beta = singular_exponent(field.kind()) + 2.0;
  const double rmax = field.domain().radius;
  const double bound = smooth_bound(field.kind());
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, [&](std::size_t c) {
    CounterRng rng(seed, (stream_base << 32) + c);
    const std::size_t begin = c * kSampleChunk;
    const std::size_t end = std::min(n, begin + kSampleChunk);
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    for (std::size_t i = begin; i < end;) {
      // Polar proposal with radial law ∝ s^{beta-1} on the circumscribed disk.
      const double s = rmax * std::pow(rng.uniform(), 1.0 / beta);
      const double t = kTwoPi * rng.uniform();
      const double u = rng.uniform();
      ++proposals;
      const Vec2 x = s * unit_normal(t);
      if (field.domain_contains(x) && u * bound <= smooth_factor(field.kind(), s, t)) {
        out[i++] = x;
        ++accepted;
      }
      if (proposals >= 10000 && accepted * 1000 < proposals) {
        fail(ErrorKind::rejection_stall, "rejection sampler acceptance rate below 1e-3");
      }
    }
  });
  return out;
}

std::string digest(const DensityField& field) {
  std::string text = field.kind_name() + ";d=" + std::to_string(field.dim());
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, RadialPower>) text += ";alpha=" + format_double(k.alpha);
        else if constexpr (std::is_same_v<K, AngularCosine>)
          text += ";a=" + format_double(k.amplitude) + ";k=" + std::to_string(k.frequency);
        else if constexpr (std::is_same_v<K, GaussianTrunc>) text += ";sigma=" + format_double(k.sigma);
      },
      field.kind());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= p[i];
      hash *= 0x100000001b3ULL;
    }
  };
  if (field.domain().is_ball()) {
    text += ";ball=" + format_double(field.domain().radius);
  } else {
    const auto h = field.domain().body->h();
    feed(h.data(), h.size() * sizeof(double));
    text += ";body";
  }
  feed(text.data(), text.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return text + "#" + buf;
}

}  // namespace gtrans
