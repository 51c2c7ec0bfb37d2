#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entnet/artifacts.hpp"
#include "entnet/config.hpp"
#include "entnet/cpwl.hpp"
#include "entnet/loss.hpp"
#include "entnet/metrics.hpp"
#include "entnet/train.hpp"
#include "entnet/weno.hpp"

namespace py = pybind11;
using namespace entnet;

namespace {

Pt to_pt(const std::vector<double>& z) {
  Pt p{};
  for (std::size_t i = 0; i < z.size() && i < p.size(); ++i) p[i] = z[i];
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropy-residual neural network training for scalar conservation laws";
  m.attr("__version__") = version_string();

  py::class_<FluxModel>(m, "FluxModel")
      .def_readonly("name", &FluxModel::name)
      .def_readonly("dim", &FluxModel::dim)
      .def("f", [](const FluxModel& f, double u, int i) { return f.f(u, i); },
           py::arg("u"), py::arg("i") = 0)
      .def("f_prime", [](const FluxModel& f, double u, int i) { return f.f_prime(u, i); },
           py::arg("u"), py::arg("i") = 0)
      .def("spacetime", [](const FluxModel& f, double u) { return eval_spacetime_flux(f, u); });
  m.def("make_flux", &make_flux);
  m.def("flux_catalog_names", &flux_catalog_names);

  py::class_<QuadGrid, std::shared_ptr<QuadGrid>>(m, "QuadGrid")
      .def(py::init<std::vector<double>, std::vector<double>, double, std::vector<int>,
                    int, int, double>(),
           py::arg("lo"), py::arg("hi"), py::arg("t_final"), py::arg("n_cells_x"),
           py::arg("n_cells_t"), py::arg("oversample") = 1, py::arg("t_start") = 0.0)
      .def_property_readonly("h", &QuadGrid::h)
      .def_property_readonly("node_count", &QuadGrid::node_count)
      .def_property_readonly("cell_count", &QuadGrid::cell_count)
      .def("node_point",
           [](const QuadGrid& g, long n) {
             const Pt z = g.node_point(n);
             return std::vector<double>(z.begin(), z.begin() + g.axes());
           })
      .def("integrate", [](const QuadGrid& g, const std::vector<double>& samples) {
        return integrate(g, samples);
      });

  py::class_<BenchmarkProblem>(m, "BenchmarkProblem")
      .def_readonly("name", &BenchmarkProblem::name)
      .def_readonly("t_final", &BenchmarkProblem::t_final)
      .def_property_readonly("dim", &BenchmarkProblem::dim)
      .def_property_readonly("has_exact",
                             [](const BenchmarkProblem& p) { return p.has_exact; })
      .def("u0", [](const BenchmarkProblem& p, const std::vector<double>& x) {
        return p.u0(to_pt(x));
      });
  m.def("make_problem", &make_problem);
  m.def("problem_names", &problem_names);
  m.def("exact_solution", [](const BenchmarkProblem& p, const std::vector<double>& z) {
    return exact_solution(p, to_pt(z));
  });

  py::class_<ClippedTanhNet>(m, "ClippedTanhNet")
      .def_property_readonly("clip", &ClippedTanhNet::clip)
      .def_property_readonly("widths", &ClippedTanhNet::widths)
      .def_property_readonly("param_count", &ClippedTanhNet::param_count)
      .def("forward", [](const ClippedTanhNet& n, const std::vector<double>& z) {
        return n.forward(to_pt(z));
      })
      .def("forward_with_grad", [](const ClippedTanhNet& n, const std::vector<double>& z) {
        const auto e = n.forward_with_input_grad(to_pt(z));
        std::vector<double> g(e.grad.begin(), e.grad.begin() + n.input_dim());
        return py::make_tuple(e.value, g, e.active);
      });
  m.def("init_network", &init_network, py::arg("widths"), py::arg("clip"), py::arg("seed"));
  m.def("save_network", &save_network);
  m.def("load_network", &load_network);

  m.def("weno5_reconstruct", [](const std::vector<double>& s) {
    if (s.size() != 5) throw std::invalid_argument("stencil must have 5 values");
    return weno5_reconstruct({s[0], s[1], s[2], s[3], s[4]});
  });
  m.def(
      "solve_reference",
      [](const std::string& benchmark, int cells, double cfl, std::vector<double> times) {
        const BenchmarkProblem p = make_problem(benchmark);
        if (times.empty()) times = {p.t_final};
        const RefSolution sol = solve_reference(p, cells, cfl, times);
        py::list out;
        for (const FvState& s : sol.snapshots) {
          std::vector<double> xs(s.u.size());
          for (std::size_t i = 0; i < s.u.size(); ++i)
            xs[i] = s.cell_center(static_cast<int>(i));
          out.append(py::make_tuple(s.time, xs, s.u));
        }
        return out;
      },
      py::arg("benchmark"), py::arg("cells") = 1024, py::arg("cfl") = 0.4,
      py::arg("times") = std::vector<double>{});

  m.def("psi_tau", &psi_tau);
  m.def("smooth_min", &smooth_min);
  m.def("smooth_max", &smooth_max);

  m.def(
      "hat_compile_trace",
      [](const std::vector<double>& breaks, int node, double tol) {
        auto mesh = std::make_shared<SimplicialMesh>(
            make_interval_mesh(std::span<const double>(breaks.data(), breaks.size())));
        std::vector<double> nodal(mesh->vertex_count(), 0.0);
        nodal.at(node) = 1.0;
        const CompiledCpwl res = compile_cpwl_to_net(CpwlFunction(mesh, nodal), tol);
        py::list rows;
        for (const auto& r : res.trace)
          rows.append(py::make_tuple(r.tau, r.sup_error, r.w11_error));
        return rows;
      },
      py::arg("breaks"), py::arg("node"), py::arg("tol") = 1e-3);

  m.def("train_from_json", [](const std::string& config_json) {
    const RunConfig cfg = parse_config(nlohmann::json::parse(config_json));
    const TrainResult r = train(cfg.train);
    py::dict out;
    out["wall_seconds"] = r.wall_seconds;
    py::list strips;
    for (const auto& s : r.strips) {
      py::dict d;
      d["best_iteration"] = s.best_iteration;
      d["best_total"] = s.best_loss.total;
      d["iterations"] = s.history.size();
      strips.append(d);
    }
    out["strips"] = strips;
    if (r.metrics) {
      out["e_r_final"] = r.metrics->e_r_final;
      out["e_r_spacetime"] = r.metrics->e_r_spacetime;
      out["reference_kind"] = r.metrics->reference_kind;
    }
    return out;
  });
}
