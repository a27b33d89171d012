#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gtrans/analysis.hpp"
#include "gtrans/cli.hpp"
#include "gtrans/discrete_ot.hpp"
#include "gtrans/error.hpp"
#include "gtrans/io.hpp"
#include "gtrans/transport.hpp"

namespace py = pybind11;
using namespace gtrans;

namespace {

using Point = std::pair<double, double>;

Vec2 vec(const Point& p) { return {p.first, p.second}; }
Point tup(Vec2 v) { return {v.x, v.y}; }

std::vector<Vec2> points(const std::vector<Point>& pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(vec(p));
  return out;
}

DensityKind make_kind(const std::string& kind, double alpha, double amplitude, int frequency, double sigma) {
  if (kind == "uniform") return Uniform{};
  if (kind == "radial_power") return RadialPower{alpha};
  if (kind == "angular_cosine") return AngularCosine{amplitude, frequency};
  if (kind == "gaussian_trunc") return GaussianTrunc{sigma};
  fail(ErrorKind::invalid_argument, "unknown density kind '" + kind + "'");
}

py::dict to_dict(const PushforwardReport& r) {
  py::dict d;
  d["radial_W1"] = r.radial_W1;
  d["W1_bound"] = r.W1_bound;
  d["angular_chisq"] = r.angular_chisq;
  d["angular_chisq_pvalue"] = r.angular_chisq_pvalue;
  d["grid_error"] = r.grid_error;
  d["n_used"] = r.n_used;
  d["pass"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gauss transport: support-function solver, transport map and verification checks";

  static py::exception<Error> error(m, "GtransError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(kind_name(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::enum_<DiffRule>(m, "DiffRule").value("spectral", DiffRule::spectral).value("central", DiffRule::central);

  py::class_<ConvexBody>(m, "ConvexBody")
      .def(py::init<std::vector<double>, DiffRule>(), py::arg("h"), py::arg("rule") = DiffRule::spectral)
      .def_property_readonly("n_theta", &ConvexBody::n_theta)
      .def_property_readonly("h", [](const ConvexBody& b) { return std::vector<double>(b.h().begin(), b.h().end()); })
      .def_property_readonly("radius",
                             [](const ConvexBody& b) { return std::vector<double>(b.radius().begin(), b.radius().end()); })
      .def("area", [](const ConvexBody& b) { return area(b); })
      .def("perimeter", [](const ConvexBody& b) { return perimeter(b); })
      .def("contains", [](const ConvexBody& b, const Point& x) { return contains(b, vec(x)); })
      .def("boundary_point", [](const ConvexBody& b, int j) { return tup(boundary_point(b, j)); })
      .def("curvature", [](const ConvexBody& b, int j) { return curvature_from_support(b, j); });

  m.def("disk", &body_from_disk, py::arg("radius"), py::arg("n_theta") = kDefaultNTheta);
  m.def("ellipse", &body_from_ellipse, py::arg("a"), py::arg("b"), py::arg("n_theta") = kDefaultNTheta);
  m.def(
      "polygon", [](const std::vector<Point>& v, int n) { return body_from_polygon(points(v), n); },
      py::arg("vertices"), py::arg("n_theta") = kDefaultNTheta);
  m.def(
      "smoothed_polygon",
      [](const std::vector<Point>& v, double rounding, double mollify, int n) {
        return body_smoothed_polygon(points(v), rounding, mollify, n);
      },
      py::arg("vertices"), py::arg("rounding") = 0.1, py::arg("mollify") = 0.2, py::arg("n_theta") = kDefaultNTheta);

  py::class_<DensityField>(m, "DensityField")
      .def_property_readonly("Z", &DensityField::Z)
      .def_property_readonly("dim", &DensityField::dim)
      .def_property_readonly("kind", &DensityField::kind_name)
      .def("__call__", [](const DensityField& f, const Point& x) { return eval(f, vec(x)); })
      .def("radial_cdf", [](const DensityField& f, double s) { return radial_cdf(f, s); })
      .def(
          "sample",
          [](const DensityField& f, std::size_t n, std::uint64_t seed) {
            std::vector<Point> out;
            for (Vec2 p : sample(f, n, seed)) out.push_back(tup(p));
            return out;
          },
          py::arg("n"), py::arg("seed") = 1)
      .def("digest", [](const DensityField& f) { return digest(f); });

  m.def(
      "ball_density",
      [](double R, const std::string& kind, double alpha, double amplitude, int frequency, double sigma, int dim) {
        return normalize(DensityField(Domain::ball(R), make_kind(kind, alpha, amplitude, frequency, sigma), dim));
      },
      py::arg("radius") = 1.0, py::arg("kind") = "uniform", py::arg("alpha") = 0.0, py::arg("amplitude") = 0.0,
      py::arg("frequency") = 1, py::arg("sigma") = 1.0, py::arg("dim") = 2);
  m.def(
      "body_density",
      [](const ConvexBody& body, const std::string& kind, double alpha, double amplitude, int frequency, double sigma) {
        return normalize(DensityField(Domain::of_body(body), make_kind(kind, alpha, amplitude, frequency, sigma)));
      },
      py::arg("body"), py::arg("kind") = "uniform", py::arg("alpha") = 0.0, py::arg("amplitude") = 0.0,
      py::arg("frequency") = 1, py::arg("sigma") = 1.0);

  py::class_<SupportField>(m, "SupportField")
      .def_readonly("d", &SupportField::d)
      .def_readonly("R", &SupportField::R)
      .def_readonly("r_stop", &SupportField::r_stop)
      .def_readonly("n_r", &SupportField::n_r)
      .def_readonly("n_theta", &SupportField::n_theta)
      .def_readonly("digest", &SupportField::digest)
      .def("r", &SupportField::r)
      .def_property_readonly("H", [](const SupportField& f) {
        py::array_t<double> a({f.n_r + 1, f.n_theta});
        std::copy(f.H.begin(), f.H.end(), a.mutable_data());
        return a;
      });

  m.def(
      "solve_2d",
      [](const ConvexBody& A, const DensityField& rho0, const DensityField& rho1, int n_r, int n_theta, double r_stop,
         DiffRule rule) {
        GridSpec g;
        g.n_r = n_r;
        g.n_theta = n_theta;
        g.r_stop = r_stop;
        SolverOptions o;
        o.rule = rule;
        SolveStats st;
        SupportField f;
        {
          py::gil_scoped_release release;
          f = solve_2d(A, rho0, rho1, g, o, &st);
        }
        py::dict stats;
        stats["substeps"] = st.substeps;
        stats["clamp_count"] = st.clamp_count;
        stats["halvings"] = st.halvings;
        stats["min_radius"] = st.min_radius;
        return py::make_tuple(f, stats);
      },
      py::arg("body"), py::arg("rho0"), py::arg("rho1"), py::arg("n_r") = 256, py::arg("n_theta") = kDefaultNTheta,
      py::arg("r_stop") = 0.0, py::arg("rule") = DiffRule::spectral);

  py::class_<RadialProfile>(m, "RadialProfile")
      .def("q", &RadialProfile::q)
      .def("q_inv", &RadialProfile::q_inv)
      .def("max_cdf_mismatch", &RadialProfile::max_cdf_mismatch);
  m.def("solve_radial", &solve_radial, py::arg("d"), py::arg("rho0"), py::arg("rho1"));

  m.def("write_hfield", &write_hfield_csv, py::arg("path"), py::arg("field"));
  m.def("read_hfield", &read_hfield_csv, py::arg("path"));

  py::class_<TransportMap>(m, "TransportMap")
      .def(py::init<SupportField, DensityField, DensityField>(), py::arg("field"), py::arg("rho0"), py::arg("rho1"))
      .def_property_readonly("field", &TransportMap::field)
      .def("phi", [](const TransportMap& t, const Point& x) { return phi(t, vec(x)); })
      .def("grad_norm", [](const TransportMap& t, const Point& x) { return normal_and_grad(t, vec(x)).grad; })
      .def("forward", [](const TransportMap& t, const Point& x) { return tup(forward(t, vec(x))); })
      .def("inverse", [](const TransportMap& t, const Point& y) { return tup(inverse(t, vec(y))); })
      .def("cov_residual", [](const TransportMap& t, const Point& x) { return cov_residual(t, vec(x)); })
      .def(
          "jacobian", [](const TransportMap& t, const Point& x, double step) { return jacobian_fd(t, vec(x), step); },
          py::arg("x"), py::arg("step") = 1e-3)
      .def(
          "roundtrip_error", [](const TransportMap& t, int count, std::uint64_t seed) {
            return roundtrip_error(t, count, seed);
          },
          py::arg("count") = 1000, py::arg("seed") = 1)
      .def(
          "pushforward_test",
          [](const TransportMap& t, std::size_t n, std::uint64_t seed, int bins) {
            return to_dict(pushforward_test(t, n, seed, bins));
          },
          py::arg("n") = 100000, py::arg("seed") = 1, py::arg("bins") = 32);

  m.def(
      "solve_assignment",
      [](const std::vector<Point>& X, const std::vector<Point>& Y, double t) {
        const AssignmentPlan p = solve_assignment(points(X), points(Y), t);
        return py::make_tuple(p.sigma, p.total_cost);
      },
      py::arg("X"), py::arg("Y"), py::arg("t") = 0.0);
  m.def(
      "convergence_experiment",
      [](const TransportMap& map, std::size_t n, std::uint64_t seed, std::vector<double> t_list) {
        py::list rows;
        for (const auto& r : convergence_experiment(map, n, seed, t_list)) {
          py::dict d;
          d["t"] = r.t;
          d["mean_disp"] = r.mean;
          d["median_disp"] = r.median;
          d["max_disp"] = r.max;
          d["n"] = r.n;
          d["seed"] = r.seed;
          rows.append(d);
        }
        return rows;
      },
      py::arg("map"), py::arg("n") = 256, py::arg("seed") = 1, py::arg("t_list") = default_t_list());
  m.def("sampling_floor", &sampling_floor, py::arg("map"), py::arg("n") = 256, py::arg("seed") = 1);

  m.def(
      "maxprin_ratio",
      [](const ConvexBody& body, double power, int levels, int grid) {
        return maxprin_euclidean(radial_power_field(body, power), levels, grid).ratio;
      },
      py::arg("body"), py::arg("power") = 2.0, py::arg("levels") = 64, py::arg("grid") = 801);
  m.def(
      "isoperimetric_check",
      [](const ConvexBody& body, int n_r, int samples) {
        IsoOptions o;
        o.n_r = n_r;
        o.samples = samples;
        const IsoReport r = isoperimetric_check(body, o);
        py::dict d;
        d["area"] = r.area;
        d["perimeter"] = r.perimeter;
        d["R"] = r.R;
        d["bound"] = r.bound;
        d["ratio"] = r.ratio;
        d["amgm_violations"] = r.amgm_violations;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("body"), py::arg("n_r") = 256, py::arg("samples") = 200);
  m.def(
      "sobolev_check",
      [](const TransportMap& map, double p) {
        const SobolevReport r = sobolev_check(map, p);
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs1"] = r.rhs1;
        d["rhs2"] = r.rhs2;
        d["c_hat"] = r.c_hat;
        d["inv_C_impl"] = r.inv_C_impl;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("map"), py::arg("p") = 1.0);
  m.def(
      "gaussmap_pushforward",
      [](const ConvexBody& body, const std::function<double(double)>& f) {
        const GaussMapReport r = gaussmap_pushforward(body, f);
        return py::make_tuple(r.boundary_integral, r.sphere_integral, r.pass);
      },
      py::arg("body"), py::arg("f"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "gtrans");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        py::gil_scoped_release release;
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"));
}
