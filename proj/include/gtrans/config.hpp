#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtrans/analysis.hpp"
#include "gtrans/fields.hpp"
#include "gtrans/pma.hpp"

namespace gtrans {

struct BodySpec {
  std::string kind = "disk";  // disk | ellipse | polygon | smoothed_polygon
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  bool equal_area = false;  // rescale to the area of the target ball
  std::vector<Vec2> vertices;
  double rounding = 0.1;
  double mollify = 0.2;
};

struct DensitySpec {
  bool on_body = false;  // domain: the configured body, else a ball
  double radius = 1.0;
  DensityKind kind = Uniform{};
};

struct VerifySpec {
  std::size_t samples = 100000;
  int bins = 32;
  int roundtrip_points = 1000;
  double cov_tol = 5e-3;
  double roundtrip_tol = 1e-4;
  double chart_tol = 1e-3;
};

struct PrelimitSpec {
  std::size_t n = 256;
  std::vector<double> t_list = {1.0, 3.0, 10.0, 30.0, 100.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

struct MaxprinSpec {
  std::string v = "radial_power";  // radial_power | quadratic_bump | two_bumps | constant
  double power = 2.0;
  Vec2 center{0.0, 0.0};
  Vec2 center2{0.4, 0.0};
  double width = 0.3;
  double value = 1.0;
  int levels = 64;
  int grid = 801;
};

struct SectorSpec {
  SectorField field;
  int n_r = 400;
  int n_theta = 400;
};

struct ProblemConfig {
  int dim = 2;
  BodySpec body;
  DensitySpec rho0;
  DensitySpec rho1;
  GridSpec grid;
  DiffRule rule = DiffRule::spectral;
  std::uint64_t seed = 1;
  std::string output = "out";
  VerifySpec verify;
  PrelimitSpec prelimit;
  MaxprinSpec maxprin;
  SectorSpec sector;
  double sobolev_p = 1.0;
  IsoOptions iso;
  std::vector<double> levelset_r;

  double R() const { return rho1.radius; }
};

// Parses and validates a JSON document; throws Error(config) on any problem.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

ConvexBody make_body(const ProblemConfig& cfg);
DensityField make_rho0(const ProblemConfig& cfg);
DensityField make_rho1(const ProblemConfig& cfg);
ScalarFieldOnBody make_maxprin_field(const ProblemConfig& cfg);

}  // namespace gtrans
