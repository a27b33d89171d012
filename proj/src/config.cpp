#include "gtrans/config.hpp"

#include <set>

#include <json.hpp>

#include "gtrans/error.hpp"
#include "gtrans/io.hpp"

namespace gtrans {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::config, what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) bad("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vec2 to_point(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("points are [x, y] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

DensityKind parse_density(const json& j) {
  allow_keys(j, "density", {"kind", "alpha", "amplitude", "frequency", "sigma"});
  const auto kind = get_or<std::string>(j, "kind", "");
  if (kind == "uniform") return Uniform{};
  if (kind == "radial_power") return RadialPower{get_or(j, "alpha", 0.0)};
  if (kind == "angular_cosine") return AngularCosine{get_or(j, "amplitude", 0.0), get_or(j, "frequency", 1)};
  if (kind == "gaussian_trunc") return GaussianTrunc{get_or(j, "sigma", 1.0)};
  bad("unknown density kind '" + kind + "'");
}

DensitySpec parse_density_spec(const json& j, const std::string& where) {
  allow_keys(j, where, {"domain", "density"});
  DensitySpec s;
  if (!j.contains("domain") || !j.contains("density")) bad(where + " needs 'domain' and 'density'");
  const json& d = j.at("domain");
  allow_keys(d, where + ".domain", {"kind", "radius"});
  const auto kind = get_or<std::string>(d, "kind", "");
  if (kind == "body") {
    s.on_body = true;
  } else if (kind == "ball") {
    s.radius = get_or(d, "radius", 1.0);
    if (!(s.radius > 0.0)) bad(where + ": ball radius must be positive");
  } else {
    bad(where + ": unknown domain kind '" + kind + "'");
  }
  s.kind = parse_density(j.at("density"));
  return s;
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  allow_keys(j, "config", {"dim", "body", "rho0", "rho1", "grid", "seed", "output", "verify", "prelimit", "analysis",
                           "levelsets", "description"});
  ProblemConfig cfg;
  cfg.dim = get_or(j, "dim", 2);
  if (cfg.dim < 2) bad("dim must be at least 2");
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
  cfg.output = get_or<std::string>(j, "output", "out");

  if (j.contains("body")) {
    const json& b = j.at("body");
    allow_keys(b, "body", {"kind", "radius", "a", "b", "equal_area", "vertices", "rounding", "mollify"});
    cfg.body.kind = get_or<std::string>(b, "kind", "disk");
    cfg.body.radius = get_or(b, "radius", 1.0);
    cfg.body.a = get_or(b, "a", 1.0);
    cfg.body.b = get_or(b, "b", 1.0);
    cfg.body.equal_area = get_or(b, "equal_area", false);
    cfg.body.rounding = get_or(b, "rounding", 0.1);
    cfg.body.mollify = get_or(b, "mollify", 0.2);
    if (b.contains("vertices")) {
      for (const auto& v : b.at("vertices")) cfg.body.vertices.push_back(to_point(v));
    }
    const std::set<std::string> kinds{"disk", "ellipse", "polygon", "smoothed_polygon"};
    if (!kinds.count(cfg.body.kind)) bad("unknown body kind '" + cfg.body.kind + "'");
    if ((cfg.body.kind == "polygon" || cfg.body.kind == "smoothed_polygon") && cfg.body.vertices.size() < 3) {
      bad("polygon bodies need at least 3 vertices");
    }
  }
  if (!j.contains("rho0") || !j.contains("rho1")) bad("config needs rho0 and rho1");
  cfg.rho0 = parse_density_spec(j.at("rho0"), "rho0");
  cfg.rho1 = parse_density_spec(j.at("rho1"), "rho1");
  if (cfg.rho1.on_body) bad("rho1 must live on a ball B_R");
  if (cfg.dim > 2 && cfg.rho0.on_body) bad("d >= 3 supports only ball domains");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    allow_keys(g, "grid", {"n_r", "n_theta", "r_stop", "rule", "R"});
    cfg.grid.n_r = get_or(g, "n_r", 256);
    cfg.grid.n_theta = get_or(g, "n_theta", kDefaultNTheta);
    cfg.grid.r_stop = get_or(g, "r_stop", 0.0);
    const auto rule = get_or<std::string>(g, "rule", cfg.body.kind == "polygon" ? "central" : "spectral");
    if (rule == "spectral") cfg.rule = DiffRule::spectral;
    else if (rule == "central") cfg.rule = DiffRule::central;
    else bad("unknown differentiation rule '" + rule + "'");
    if (g.contains("R") && std::abs(g.at("R").get<double>() - cfg.rho1.radius) > 1e-12 * cfg.rho1.radius) {
      bad("grid.R disagrees with the radius of rho1's ball");
    }
  } else if (cfg.body.kind == "polygon") {
    cfg.rule = DiffRule::central;
  }
  if (!is_power_of_two(cfg.grid.n_theta) || cfg.grid.n_theta < 8) bad("n_theta must be a power of two >= 8");
  if (cfg.grid.n_r < 4) bad("n_r must be at least 4");
  if (cfg.grid.r_stop == 0.0) cfg.grid.r_stop = 0.05 * cfg.rho1.radius;
  if (!(cfg.grid.r_stop > 0.0 && cfg.grid.r_stop < cfg.rho1.radius)) bad("r_stop must lie in (0, R)");

  if (j.contains("verify")) {
    const json& v = j.at("verify");
    allow_keys(v, "verify", {"samples", "bins", "roundtrip_points", "cov_tol", "roundtrip_tol", "chart_tol"});
    cfg.verify.samples = get_or<std::size_t>(v, "samples", cfg.verify.samples);
    cfg.verify.bins = get_or(v, "bins", cfg.verify.bins);
    cfg.verify.roundtrip_points = get_or(v, "roundtrip_points", cfg.verify.roundtrip_points);
    cfg.verify.cov_tol = get_or(v, "cov_tol", cfg.verify.cov_tol);
    cfg.verify.roundtrip_tol = get_or(v, "roundtrip_tol", cfg.verify.roundtrip_tol);
    cfg.verify.chart_tol = get_or(v, "chart_tol", cfg.verify.chart_tol);
  }
  if (j.contains("prelimit")) {
    const json& p = j.at("prelimit");
    allow_keys(p, "prelimit", {"n", "t_list", "seeds"});
    cfg.prelimit.n = get_or<std::size_t>(p, "n", cfg.prelimit.n);
    cfg.prelimit.t_list = get_or(p, "t_list", cfg.prelimit.t_list);
    cfg.prelimit.seeds = get_or(p, "seeds", cfg.prelimit.seeds);
  }
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    allow_keys(a, "analysis", {"maxprin", "sector", "sobolev", "iso"});
    if (a.contains("maxprin")) {
      const json& m = a.at("maxprin");
      allow_keys(m, "analysis.maxprin", {"v", "power", "center", "center2", "width", "value", "levels", "grid"});
      cfg.maxprin.v = get_or<std::string>(m, "v", cfg.maxprin.v);
      cfg.maxprin.power = get_or(m, "power", cfg.maxprin.power);
      if (m.contains("center")) cfg.maxprin.center = to_point(m.at("center"));
      if (m.contains("center2")) cfg.maxprin.center2 = to_point(m.at("center2"));
      cfg.maxprin.width = get_or(m, "width", cfg.maxprin.width);
      cfg.maxprin.value = get_or(m, "value", cfg.maxprin.value);
      cfg.maxprin.levels = get_or(m, "levels", cfg.maxprin.levels);
      cfg.maxprin.grid = get_or(m, "grid", cfg.maxprin.grid);
      const std::set<std::string> kinds{"radial_power", "quadratic_bump", "two_bumps", "constant"};
      if (!kinds.count(cfg.maxprin.v)) bad("unknown test function '" + cfg.maxprin.v + "'");
    }
    if (a.contains("sector")) {
      const json& s = a.at("sector");
      allow_keys(s, "analysis.sector", {"kind", "R1", "R2", "theta_a", "theta_b", "c", "bump_center", "bump_width", "n_r", "n_theta"});
      SectorField& f = cfg.sector.field;
      const auto kind = get_or<std::string>(s, "kind", "bump");
      if (kind == "bump") f.kind = SectorField::Kind::bump;
      else if (kind == "constant") f.kind = SectorField::Kind::constant;
      else if (kind == "increasing") f.kind = SectorField::Kind::increasing;
      else bad("unknown sector field '" + kind + "'");
      f.R1 = get_or(s, "R1", f.R1);
      f.R2 = get_or(s, "R2", f.R2);
      f.theta_a = get_or(s, "theta_a", f.theta_a);
      f.theta_b = get_or(s, "theta_b", f.theta_b);
      f.c = get_or(s, "c", f.c);
      f.bump_center = get_or(s, "bump_center", f.bump_center);
      f.bump_width = get_or(s, "bump_width", f.bump_width);
      cfg.sector.n_r = get_or(s, "n_r", cfg.sector.n_r);
      cfg.sector.n_theta = get_or(s, "n_theta", cfg.sector.n_theta);
    }
    if (a.contains("sobolev")) {
      allow_keys(a.at("sobolev"), "analysis.sobolev", {"p"});
      cfg.sobolev_p = get_or(a.at("sobolev"), "p", cfg.sobolev_p);
    }
    if (a.contains("iso")) {
      const json& s = a.at("iso");
      allow_keys(s, "analysis.iso", {"n_r", "samples", "jac_step", "tol_iso"});
      cfg.iso.n_r = get_or(s, "n_r", cfg.iso.n_r);
      cfg.iso.samples = get_or(s, "samples", cfg.iso.samples);
      cfg.iso.jac_step = get_or(s, "jac_step", cfg.iso.jac_step);
      cfg.iso.tol_iso = get_or(s, "tol_iso", cfg.iso.tol_iso);
    }
  }
  if (j.contains("levelsets")) {
    allow_keys(j.at("levelsets"), "levelsets", {"r"});
    cfg.levelset_r = get_or(j.at("levelsets"), "r", cfg.levelset_r);
  }
  cfg.iso.seed = cfg.seed;
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  return parse_config(text);
}

ConvexBody make_body(const ProblemConfig& cfg) {
  const BodySpec& b = cfg.body;
  const int n = cfg.grid.n_theta;
  if (b.kind == "disk") return body_from_disk(b.radius, n);
  if (b.kind == "ellipse") {
    double a = b.a;
    double c = b.b;
    if (b.equal_area) {
      const double s = cfg.R() / std::sqrt(a * c);
      a *= s;
      c *= s;
    }
    return body_from_ellipse(a, c, n);
  }
  if (b.kind == "polygon") return body_from_polygon(b.vertices, n);
  return body_smoothed_polygon(b.vertices, b.rounding, b.mollify, n);
}

DensityField make_rho0(const ProblemConfig& cfg) {
  const Domain dom = cfg.rho0.on_body ? Domain::of_body(make_body(cfg)) : Domain::ball(cfg.rho0.radius);
  return normalize(DensityField(dom, cfg.rho0.kind, cfg.dim));
}

DensityField make_rho1(const ProblemConfig& cfg) {
  return normalize(DensityField(Domain::ball(cfg.rho1.radius), cfg.rho1.kind, cfg.dim));
}

ScalarFieldOnBody make_maxprin_field(const ProblemConfig& cfg) {
  ConvexBody body = make_body(cfg);
  const MaxprinSpec& m = cfg.maxprin;
  if (m.v == "radial_power") return radial_power_field(std::move(body), m.power);
  if (m.v == "quadratic_bump") return quadratic_bump_field(std::move(body), m.center, m.width);
  if (m.v == "two_bumps") return two_bumps_field(std::move(body), m.center, m.center2, m.width);
  return constant_field(std::move(body), m.value);
}

}  // namespace gtrans
