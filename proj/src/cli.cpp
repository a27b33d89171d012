#include "gtrans/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtrans/analysis.hpp"
#include "gtrans/config.hpp"
#include "gtrans/discrete_ot.hpp"
#include "gtrans/error.hpp"
#include "gtrans/io.hpp"
#include "gtrans/transport.hpp"

namespace gtrans {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string which;
  bool quiet = false;
};

struct Context {
  ProblemConfig cfg;
  fs::path out;
  bool quiet = false;

  void note(const std::string& msg) const {
    if (!quiet) std::cerr << msg << '\n';
  }
};

// Thrown when a verification or analysis check fails after its reports are written.
struct CheckFailed {};

Context make_context(const Options& o) {
  Context ctx;
  ctx.cfg = load_config(o.config);
  if (o.seed) {
    ctx.cfg.seed = *o.seed;
    ctx.cfg.iso.seed = *o.seed;
    ctx.cfg.prelimit.seeds = {*o.seed};
  }
  ctx.out = o.out.empty() ? fs::path(ctx.cfg.output) : fs::path(o.out);
  ctx.quiet = o.quiet;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + ctx.out.string());
  return ctx;
}

std::set<std::string> parse_which(const std::string& text, const std::set<std::string>& allowed,
                                  const std::set<std::string>& fallback) {
  if (text.empty()) return fallback;
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (!allowed.count(item)) fail(ErrorKind::config, "unknown check '" + item + "'");
    out.insert(item);
  }
  return out;
}

void write_json(const fs::path& path, const json& j) { write_text(path.string(), j.dump(2) + "\n"); }

json error_json(const Error& e) { return {{"kind", std::string(kind_name(e.kind()))}, {"message", e.what()}}; }

// Support of ρ0: the configured body, or the disk of ρ0's ball.
ConvexBody source_body(const ProblemConfig& cfg) {
  if (cfg.rho0.on_body) return make_body(cfg);
  return body_from_disk(cfg.rho0.radius, cfg.grid.n_theta);
}

struct Solved {
  SupportField field;
  json log;
};

Solved solve(const ProblemConfig& cfg) {
  const DensityField rho0 = make_rho0(cfg);
  const DensityField rho1 = make_rho1(cfg);
  Solved s;
  json grid = {{"n_r", cfg.grid.n_r}, {"n_theta", cfg.grid.n_theta}, {"r_stop", cfg.grid.r_stop}, {"R", cfg.R()}};
  if (cfg.dim == 2) {
    SolverOptions opts;
    opts.rule = cfg.rule;
    SolveStats st;
    s.field = solve_2d(source_body(cfg), rho0, rho1, cfg.grid, opts, &st);
    const double nodes = static_cast<double>(cfg.grid.n_r) * cfg.grid.n_theta;
    s.log = {{"dim", 2},
             {"rule", cfg.rule == DiffRule::spectral ? "spectral" : "central"},
             {"grid", grid},
             {"substeps", st.substeps},
             {"clamp_count", st.clamp_count},
             {"clamp_fraction", static_cast<double>(st.clamp_count) / nodes},
             {"halvings", st.halvings},
             {"min_radius", st.min_radius}};
  } else {
    const RadialProfile prof = solve_radial(cfg.dim, rho0, rho1);
    SupportField f;
    f.d = cfg.dim;
    f.R = cfg.R();
    f.r_stop = cfg.grid.r_stop;
    f.n_r = cfg.grid.n_r;
    f.n_theta = cfg.grid.n_theta;
    f.digest = digest(rho0) + "|" + digest(rho1);
    f.H.resize(static_cast<std::size_t>(f.n_r + 1) * f.n_theta);
    double min_radius = INFINITY;
    for (int k = 0; k <= f.n_r; ++k) {
      const double h = prof.q_inv(f.r(k));
      min_radius = std::min(min_radius, h);
      std::fill_n(f.H.begin() + static_cast<std::ptrdiff_t>(k) * f.n_theta, f.n_theta, h);
    }
    s.field = std::move(f);
    s.log = {{"dim", cfg.dim},
             {"rule", "radial"},
             {"grid", grid},
             {"substeps", 0},
             {"clamp_count", 0},
             {"clamp_fraction", 0.0},
             {"halvings", 0},
             {"min_radius", min_radius},
             {"cdf_mismatch", prof.max_cdf_mismatch()}};
  }
  s.log["digest"] = s.field.digest;
  return s;
}

// Loads <out>/hfield.csv when present, otherwise solves.
TransportMap obtain_map(const Context& ctx) {
  const fs::path hpath = ctx.out / "hfield.csv";
  DensityField rho0 = make_rho0(ctx.cfg);
  DensityField rho1 = make_rho1(ctx.cfg);
  if (fs::exists(hpath)) {
    ctx.note("loading " + hpath.string());
    SupportField f = read_hfield_csv(hpath.string());
    if (std::abs(f.R - ctx.cfg.R()) > 1e-12 * ctx.cfg.R() || f.d != ctx.cfg.dim) {
      fail(ErrorKind::config, "stored H-field does not match the configuration");
    }
    return TransportMap(std::move(f), std::move(rho0), std::move(rho1));
  }
  ctx.note("no stored H-field; solving");
  return TransportMap(solve(ctx.cfg).field, std::move(rho0), std::move(rho1));
}

// ---------------------------------------------------------------------------

int cmd_solve(const Context& ctx) {
  json log;
  try {
    Solved s = solve(ctx.cfg);
    write_hfield_csv((ctx.out / "hfield.csv").string(), s.field);
    log = std::move(s.log);
    log["status"] = "ok";
    write_json(ctx.out / "solve_log.json", log);
    return kExitOk;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config || e.kind() == ErrorKind::io) throw;
    log = {{"status", "error"}, {"error", error_json(e)}};
    write_json(ctx.out / "solve_log.json", log);
    throw;
  }
}

// Relative change-of-variables residual at the preimages of points on interior levels.
json check_cov(const TransportMap& map, double tol) {
  const SupportField& f = map.field();
  double worst = 0.0;
  std::vector<double> all;
  for (int k = 2; k <= f.n_r - 2; ++k) {
    const double r = f.r(k);
    for (int a = 0; a < 8; ++a) {
      const double ang = kTwoPi * (a + 0.5) / 8.0;
      const Vec2 x = inverse(map, {r * std::cos(ang), r * std::sin(ang)});
      const double res = cov_residual(map, x);
      all.push_back(res);
      worst = std::max(worst, res);
    }
  }
  std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
  return {{"max_residual", worst}, {"median_residual", all[all.size() / 2]}, {"points", all.size()},
          {"tol", tol}, {"pass", worst <= tol}};
}

json check_chart(const TransportMap& map, double tol) {
  const SupportField& f = map.field();
  const FieldInterpolant& in = map.interpolant();
  double id_max = 0.0;
  double ma_max = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const double r = f.r(k * f.n_r / 4);
    for (double z : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
      id_max = std::max(id_max, chart_identity_residual(in, z, r));
      ma_max = std::max(ma_max, ma1_residual(in, map.rho0(), map.rho1(), z, r));
    }
  }
  return {{"identity_residual", id_max}, {"ma_residual", ma_max}, {"tol", tol},
          {"pass", id_max <= tol && ma_max <= tol}};
}

json check_gaussmap(const ConvexBody& body) {
  json out = json::object();
  bool pass = true;
  const std::vector<std::pair<std::string, std::function<double(double)>>> tests = {
      {"one", [](double) { return 1.0; }},
      {"cos", [](double t) { return std::cos(t); }},
      {"cos2", [](double t) { return std::cos(t) * std::cos(t); }}};
  for (const auto& [name, fn] : tests) {
    const GaussMapReport r = gaussmap_pushforward(body, fn);
    out[name] = {{"boundary_integral", r.boundary_integral}, {"sphere_integral", r.sphere_integral},
                 {"rel_error", r.rel_error}, {"tol", r.tol}, {"pass", r.pass}};
    pass = pass && r.pass;
  }
  out["pass"] = pass;
  return out;
}

int cmd_verify(const Context& ctx, const std::string& which_text) {
  const std::set<std::string> all{"cov", "pushforward", "chart", "gaussmap", "roundtrip"};
  const std::set<std::string> which = parse_which(which_text, all, all);
  const ProblemConfig& cfg = ctx.cfg;
  const TransportMap map = obtain_map(ctx);

  json report = {{"checks", json::object()}};
  bool pass = true;
  auto run = [&](const std::string& name, const std::function<json()>& body) {
    json r;
    try {
      r = body();
    } catch (const Error& e) {
      r = {{"pass", false}, {"error", error_json(e)}};
    }
    pass = pass && r.value("pass", false);
    report["checks"][name] = r;
    ctx.note(name + ": " + (r.value("pass", false) ? "pass" : "FAIL"));
  };

  run("invariants", [&] {
    check_support_field(map.field());
    return json{{"pass", true}};
  });
  const bool planar = cfg.dim == 2;
  if (which.count("cov") && planar) run("cov", [&] { return check_cov(map, cfg.verify.cov_tol); });
  if (which.count("pushforward") && planar) {
    run("pushforward", [&] {
      const PushforwardReport p = pushforward_test(map, cfg.verify.samples, cfg.seed, cfg.verify.bins);
      return json{{"radial_W1", p.radial_W1}, {"W1_bound", p.W1_bound}, {"angular_chisq", p.angular_chisq},
                  {"angular_chisq_pvalue", p.angular_chisq_pvalue}, {"grid_error", p.grid_error},
                  {"annulus", {p.annulus_lo, p.annulus_hi}}, {"n_used", p.n_used}, {"bins", p.bins},
                  {"pass", p.pass}};
    });
  }
  if (which.count("chart") && planar) run("chart", [&] { return check_chart(map, cfg.verify.chart_tol); });
  if (which.count("gaussmap") && planar) run("gaussmap", [&] { return check_gaussmap(source_body(cfg)); });
  if (which.count("roundtrip") && planar) {
    run("roundtrip", [&] {
      const double e = roundtrip_error(map, cfg.verify.roundtrip_points, cfg.seed);
      return json{{"max_error", e}, {"tol", cfg.verify.roundtrip_tol}, {"pass", e <= cfg.verify.roundtrip_tol}};
    });
  }
  if (!planar) {
    run("radial", [&] {
      const RadialProfile prof = solve_radial(cfg.dim, map.rho0(), map.rho1());
      const SupportField& f = map.field();
      double err = 0.0;
      for (int k = 0; k <= f.n_r; ++k) {
        for (int j = 0; j < f.n_theta; ++j) err = std::max(err, std::abs(f.at(k, j) - prof.q_inv(f.r(k))));
      }
      return json{{"max_error", err}, {"tol", 1e-8}, {"pass", err <= 1e-8}};
    });
  }
  report["seed"] = cfg.seed;
  report["pass"] = pass;
  write_json(ctx.out / "verify_report.json", report);
  return pass ? kExitOk : kExitVerifyFailed;
}

int cmd_prelimit(const Context& ctx) {
  const ProblemConfig& cfg = ctx.cfg;
  if (cfg.prelimit.n > kAssignmentMax) {
    fail(ErrorKind::size_limit, "n = " + std::to_string(cfg.prelimit.n) + " exceeds n_max = " +
                                    std::to_string(kAssignmentMax));
  }
  if (cfg.dim != 2) fail(ErrorKind::config, "prelimit runs in the plane only");
  const TransportMap map = obtain_map(ctx);
  std::string csv = "t,mean_disp,median_disp,max_disp,n,seed\n";
  json seeds = json::array();
  int decreasing = 0;
  for (const std::uint64_t seed : cfg.prelimit.seeds) {
    const auto rows = convergence_experiment(map, cfg.prelimit.n, seed, cfg.prelimit.t_list);
    const double floor = sampling_floor(map, cfg.prelimit.n, seed);
    const bool dec = decreasing_to_floor(rows, floor);
    decreasing += dec ? 1 : 0;
    json means = json::array();
    for (const auto& r : rows) {
      csv += format_double(r.t) + "," + format_double(r.mean) + "," + format_double(r.median) + "," +
             format_double(r.max) + "," + std::to_string(r.n) + "," + std::to_string(r.seed) + "\n";
      means.push_back(r.mean);
    }
    seeds.push_back({{"seed", seed}, {"floor", floor}, {"mean_disp", means}, {"decreasing_to_floor", dec}});
    ctx.note("seed " + std::to_string(seed) + ": floor " + format_double(floor) +
             (dec ? ", decreasing" : ", not decreasing"));
  }
  write_text((ctx.out / "prelimit.csv").string(), csv);
  write_json(ctx.out / "prelimit.json", {{"n", cfg.prelimit.n}, {"t_list", cfg.prelimit.t_list}, {"seeds", seeds},
                                         {"decreasing_seeds", decreasing}});
  return kExitOk;
}

bool sobolev_applicable(const ProblemConfig& cfg) {
  const auto* rp = std::get_if<RadialPower>(&cfg.rho1.kind);
  return cfg.dim == 2 && rp && std::abs(rp->alpha + 1.0) < 1e-12;
}

int cmd_analyze(const Context& ctx, const std::string& which_text) {
  const ProblemConfig& cfg = ctx.cfg;
  const std::set<std::string> all{"maxprin", "sector", "sobolev", "iso"};
  std::set<std::string> fallback{"maxprin", "sector", "iso"};
  if (sobolev_applicable(cfg)) fallback.insert("sobolev");
  const std::set<std::string> which = parse_which(which_text, all, fallback);
  if (which.count("sobolev") && !sobolev_applicable(cfg)) {
    fail(ErrorKind::wrong_target_density, "the Sobolev check needs rho1 = radial_power(-1) in the plane");
  }
  json report = json::object();
  bool pass = true;

  if (which.count("maxprin")) {
    const ScalarFieldOnBody v = make_maxprin_field(cfg);
    const ContactSet cs = contact_set(v, cfg.maxprin.levels, cfg.maxprin.grid);
    const EuclideanReport e = maxprin_euclidean(cs, cfg.maxprin.grid);
    std::string csv = "x,y,level,tau,contact\n";
    for (std::size_t i = 0; i < cs.levels.size(); ++i) {
      for (const ContactPoint& p : cs.levels[i].points) {
        if (!p.contact) continue;
        csv += format_double(p.x.x) + "," + format_double(p.x.y) + "," + std::to_string(i) + "," +
               format_double(cs.levels[i].tau) + ",1\n";
      }
    }
    write_text((ctx.out / "contact_points.csv").string(), csv);
    report["maxprin"] = {{"v", v.name()}, {"lhs", e.lhs}, {"integral", e.integral}, {"target", e.target},
                         {"ratio", e.ratio}, {"covered_fraction", e.covered_fraction},
                         {"min_contact_fraction", e.min_contact_fraction}, {"levels", e.levels},
                         {"grid", e.grid}, {"degenerate", e.degenerate}, {"pass", e.pass}};
    pass = pass && e.pass;
  }
  if (which.count("sector")) {
    const SectorReport s = maxprin_sector(cfg.sector.field, cfg.sector.n_r, cfg.sector.n_theta);
    std::string csv = "r,theta\n";
    for (const auto& [r, t] : s.gamma_points) csv += format_double(r) + "," + format_double(t) + "\n";
    write_text((ctx.out / "gamma_f.csv").string(), csv);
    report["sector"] = {{"field", cfg.sector.field.name()}, {"sup_omega", s.sup_omega},
                        {"sup_parabolic_boundary", s.sup_parabolic}, {"J", s.J}, {"C_Q", s.C_Q}, {"C1", s.C1},
                        {"C2", s.C2}, {"area_B", s.area_B}, {"bound", s.bound}, {"gamma_nodes", s.gamma_nodes},
                        {"covering_ok", s.covering_ok}, {"bound_ok", s.bound_ok},
                        {"grid", {cfg.sector.n_r, cfg.sector.n_theta}}, {"pass", s.pass}};
    pass = pass && s.pass;
  }
  if (which.count("sobolev")) {
    const TransportMap map = obtain_map(ctx);
    const SobolevReport s = sobolev_check(map, cfg.sobolev_p);
    report["sobolev"] = {{"p", s.p}, {"lhs", s.lhs}, {"rhs1", s.rhs1}, {"rhs2", s.rhs2},
                         {"boundary_term", s.boundary_term}, {"c_hat", s.c_hat}, {"inv_C_impl", s.inv_C_impl},
                         {"two_term_bound", s.two_term_bound}, {"pass", s.pass}};
    pass = pass && s.pass;
  }
  if (which.count("iso")) {
    const IsoReport s = isoperimetric_check(make_body(cfg), cfg.iso);
    report["iso"] = {{"area", s.area}, {"perimeter", s.perimeter}, {"R", s.R}, {"bound", s.bound},
                     {"bound_printed", s.bound_printed}, {"ratio", s.ratio},
                     {"divergence_flux", s.divergence_flux}, {"jacobian_median", s.jacobian_median},
                     {"amgm_samples", s.amgm_samples}, {"amgm_violations", s.amgm_violations},
                     {"n_r", cfg.iso.n_r}, {"pass", s.pass}};
    pass = pass && s.pass;
  }
  for (const auto& [name, r] : report.items()) ctx.note(name + ": " + (r.value("pass", false) ? "pass" : "FAIL"));
  report["pass"] = pass;
  write_json(ctx.out / "analyze_report.json", report);
  return pass ? kExitOk : kExitVerifyFailed;
}

int cmd_levelsets(const Context& ctx) {
  const ProblemConfig& cfg = ctx.cfg;
  if (cfg.dim != 2) fail(ErrorKind::config, "level sets are emitted in the plane only");
  std::vector<double> radii = cfg.levelset_r;
  if (radii.empty()) {
    for (int i = 0; i <= 4; ++i) radii.push_back(cfg.R() - (cfg.R() - cfg.grid.r_stop) * i / 4.0);
  }
  for (double r : radii) {
    if (!(r >= cfg.grid.r_stop && r <= cfg.R())) {
      fail(ErrorKind::out_of_range, "level r = " + format_double(r) + " outside [r_stop, R]");
    }
  }
  const TransportMap map = obtain_map(ctx);
  const FieldInterpolant& in = map.interpolant();
  const int n = map.field().n_theta;
  json levels = json::array();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    std::vector<Vec2> pts;
    double rmin = INFINITY;
    double rmax = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double th = kTwoPi * (j % n) / n;
      const FieldInterpolant::Value v = in.at(radii[i], th);
      const Vec2 nrm{std::cos(th), std::sin(th)};
      const Vec2 tan{-std::sin(th), std::cos(th)};
      const Vec2 p = v.H * nrm + v.H_theta * tan;
      pts.push_back(p);
      rmin = std::min(rmin, norm(p));
      rmax = std::max(rmax, norm(p));
    }
    const std::string name = "levelset_" + std::to_string(i) + ".csv";
    write_points_csv((ctx.out / name).string(), pts);
    levels.push_back({{"r", radii[i]}, {"file", name}, {"min_radius", rmin}, {"max_radius", rmax},
                      {"roundness", rmax / rmin}});
  }
  write_json(ctx.out / "levelsets.json", {{"levels", levels}});
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Gauss transport solver and verification driver", "gtrans"};
  app.require_subcommand(1);
  Options opts;
  auto add_common = [&](CLI::App* sub, bool with_which) {
    sub->add_option("--config", opts.config, "problem configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory (defaults to the config's output)");
    sub->add_option("--seed", opts.seed, "seed override");
    sub->add_flag("--quiet", opts.quiet, "suppress progress on stderr");
    if (with_which) sub->add_option("--which", opts.which, "comma-separated subset of checks");
  };
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve for the support field and write hfield.csv");
  CLI::App* verify_cmd = app.add_subcommand("verify", "run verification checks on a solved field");
  CLI::App* prelimit_cmd = app.add_subcommand("prelimit", "pre-limit assignment convergence experiment");
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "maximum principle, Sobolev and isoperimetric checks");
  CLI::App* level_cmd = app.add_subcommand("levelsets", "emit level-set polylines");
  add_common(solve_cmd, false);
  add_common(verify_cmd, true);
  add_common(prelimit_cmd, false);
  add_common(analyze_cmd, true);
  add_common(level_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  const auto start = Clock::now();
  int code = kExitError;
  try {
    const Context ctx = make_context(opts);
    if (solve_cmd->parsed()) code = cmd_solve(ctx);
    else if (verify_cmd->parsed()) code = cmd_verify(ctx, opts.which);
    else if (prelimit_cmd->parsed()) code = cmd_prelimit(ctx);
    else if (analyze_cmd->parsed()) code = cmd_analyze(ctx, opts.which);
    else code = cmd_levelsets(ctx);
  } catch (const Error& e) {
    std::cerr << "error [" << kind_name(e.kind()) << "]: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  if (!opts.quiet) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::cerr << "wall time " << secs << " s\n";
  }
  return code;
}

}  // namespace gtrans
