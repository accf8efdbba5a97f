// Python bindings: module nzsg._core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "nzsg/dynamics.h"
#include "nzsg/errors.h"
#include "nzsg/experiments.h"
#include "nzsg/game.h"
#include "nzsg/game_spec.h"
#include "nzsg/io.h"
#include "nzsg/spectral.h"

namespace py = pybind11;

namespace {

nzsg::StrategyProfile ToProfile(const nzsg::GameGraph& g, const Eigen::VectorXd& x) {
  if (x.size() != g.total_dim()) {
    throw nzsg::DimensionError("profile has length " + std::to_string(x.size()) +
                               ", game needs " + std::to_string(g.total_dim()));
  }
  return g.MakeProfile(x);
}

py::dict ResultToDict(const nzsg::ExperimentResult& r) {
  py::dict out;
  out["name"] = r.name;
  out["summary_json"] = r.summary.dump();
  py::dict artifacts;
  for (const nzsg::Artifact& a : r.artifacts) artifacts[py::str(a.name)] = a.content;
  out["artifacts"] = artifacts;
  py::list checks;
  for (const nzsg::CheckResult& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["detail"] = c.detail;
    checks.append(d);
  }
  out["checks"] = checks;
  out["passed"] = r.passed();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gradient dynamics on network zero-sum games";
  m.attr("__version__") = std::string(nzsg::kVersion);

  py::register_exception<nzsg::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<nzsg::PreconditionError>(m, "PreconditionError",
                                                  PyExc_ArithmeticError);
  py::register_exception<nzsg::SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<nzsg::SamplingBounds>(m, "SamplingBounds")
      .def(py::init([](double low, double high) { return nzsg::SamplingBounds{low, high}; }),
           py::arg("low") = 0.0, py::arg("high") = 1.0)
      .def_readwrite("low", &nzsg::SamplingBounds::low)
      .def_readwrite("high", &nzsg::SamplingBounds::high);

  py::class_<nzsg::GameGraph>(m, "Game")
      .def_property_readonly("num_players", &nzsg::GameGraph::num_players)
      .def_property_readonly("dims", &nzsg::GameGraph::dims)
      .def_property_readonly("total_dim", &nzsg::GameGraph::total_dim)
      .def_property_readonly("family", [](const nzsg::GameGraph& g) {
        return std::string(nzsg::PayoffKindName(g.family()));
      })
      .def_property_readonly("alpha",
                             [](const nzsg::GameGraph& g) { return g.moduli().alpha; })
      .def_property_readonly("beta",
                             [](const nzsg::GameGraph& g) { return g.moduli().beta; })
      .def_property_readonly(
          "lipschitz", [](const nzsg::GameGraph& g) { return g.moduli().lipschitz; })
      .def("payoffs",
           [](const nzsg::GameGraph& g, const Eigen::VectorXd& x) {
             return nzsg::AllPayoffs(g, ToProfile(g, x));
           })
      .def("gradient",
           [](const nzsg::GameGraph& g, const Eigen::VectorXd& x) {
             return Eigen::VectorXd(nzsg::JointGradient(g, ToProfile(g, x)));
           })
      .def("hessian", [](const nzsg::GameGraph& g, const Eigen::VectorXd& x) {
        return nzsg::AssembleHessian(g, ToProfile(g, x)).matrix;
      });

  m.def("game_from_spec",
        [](const std::string& spec_json) {
          return nzsg::BuildGame(nzsg::ParseGameSpec(nlohmann::json::parse(spec_json)));
        },
        py::arg("spec_json"), "Build a game from a JSON game spec string.");
  m.def("linear_game", &nzsg::MakeLinearGame, py::arg("n"), py::arg("dims"),
        py::arg("seed"), py::arg("bounds") = nzsg::SamplingBounds{});
  m.def("quadratic_game", &nzsg::MakeQuadraticScGame, py::arg("n"), py::arg("dims"),
        py::arg("seed"), py::arg("bounds") = nzsg::SamplingBounds{});
  m.def("lipschitz_game", &nzsg::MakeLipschitzScGame, py::arg("n"), py::arg("dims"),
        py::arg("seed"), py::arg("clip_radius"),
        py::arg("bounds") = nzsg::SamplingBounds{});

  m.def("random_profile",
        [](const nzsg::GameGraph& g, std::uint64_t seed, double low, double high) {
          return Eigen::VectorXd(nzsg::RandomProfile(g, seed, low, high).data());
        },
        py::arg("game"), py::arg("seed"), py::arg("low") = -1.0, py::arg("high") = 1.0);

  m.def(
      "run",
      [](const nzsg::GameGraph& g, const std::string& rule, double eta,
         std::int64_t horizon, const Eigen::VectorXd& x0) {
        nzsg::DynamicsConfig c;
        c.rule = nzsg::ParseUpdateRule(rule);
        c.schedule = nzsg::StepSchedule::Constant(eta);
        c.horizon = horizon;
        const nzsg::NashSet nash =
            g.family() == nzsg::PayoffKind::kBilinear
                ? nzsg::LinearNashSet(nzsg::AssembleHessian(g, g.ZeroProfile()))
                : nzsg::NashSet(g.ZeroProfile());
        const nzsg::Trajectory t = nzsg::Run(g, c, ToProfile(g, x0), nash);
        std::vector<std::int64_t> ts;
        std::vector<double> dist, avg;
        for (const nzsg::TrajectoryRow& row : t.rows) {
          ts.push_back(row.t);
          dist.push_back(row.dist_sq_total);
          avg.push_back(row.avg_iterate_dist_sq);
        }
        py::dict out;
        out["t"] = ts;
        out["dist_sq"] = dist;
        out["avg_iterate_dist_sq"] = avg;
        out["final_iterate"] = Eigen::VectorXd(t.final_iterate.data());
        out["time_average"] = Eigen::VectorXd(t.time_average.data());
        out["overflow"] = t.overflow;
        return out;
      },
      py::arg("game"), py::arg("rule"), py::arg("eta"), py::arg("horizon"), py::arg("x0"),
      "Constant-step GA or OGA run; distances are to the Nash set.");

  m.def(
      "spectrum",
      [](const nzsg::GameGraph& g, double eta) {
        const nzsg::SpectralReport r =
            nzsg::Spectrum(nzsg::AssembleHessian(g, g.ZeroProfile()), eta);
        return nzsg::ToJson(r).dump();
      },
      py::arg("game"), py::arg("eta"), "Spectral report at the equilibrium, as JSON.");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        return ResultToDict(nzsg::RunExperiment(
            nzsg::ParseExperimentConfig(nlohmann::json::parse(config_json))));
      },
      py::arg("config_json"));
  m.def(
      "validate",
      [](const std::string& spec_json, std::uint64_t seed) {
        return ResultToDict(
            nzsg::RunValidate(nzsg::ParseGameSpec(nlohmann::json::parse(spec_json)), seed));
      },
      py::arg("spec_json"), py::arg("seed") = 0);
}
