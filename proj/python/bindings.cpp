#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbmkit/bisection.hpp"
#include "sbmkit/bp.hpp"
#include "sbmkit/errors.hpp"
#include "sbmkit/moments.hpp"
#include "sbmkit/nb.hpp"
#include "sbmkit/posterior.hpp"
#include "sbmkit/sbm.hpp"
#include "sbmkit/tree.hpp"

namespace py = pybind11;
using namespace sbmkit;

namespace {

SbmParams params_from(std::size_t q, std::size_t n, double c_in, double c_out) {
  return SbmParams::symmetric(q, n, c_in, c_out);
}

InitMode init_from(const std::string& s) {
  if (s == "random") return InitMode::random;
  if (s == "uniform") return InitMode::uniform;
  if (s == "planted") return InitMode::planted;
  throw ParameterError("unknown init mode '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic block model sampling and inference";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<TooLargeError>(m, "TooLargeError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Graph>(m, "Graph")
      .def_static("from_edges",
                  [](std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
                    return Graph::from_edges(n, edges);
                  })
      .def_property_readonly("num_vertices", &Graph::num_vertices)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("edges",
           [](const Graph& g) {
             std::vector<std::pair<Vertex, Vertex>> out;
             for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
             return out;
           })
      .def("degree", &Graph::degree)
      .def("neighbors", [](const Graph& g, Vertex v) {
        auto nb = g.neighbors(v);
        return std::vector<Vertex>(nb.begin(), nb.end());
      });

  m.def("count_triangles", &count_triangles);
  m.def("sample_er", &sample_er, py::arg("n"), py::arg("c"), py::arg("seed"));
  m.def("sample_regular", &sample_regular, py::arg("n"), py::arg("d"), py::arg("seed"));

  m.def(
      "sample_sbm",
      [](std::size_t q, std::size_t n, double c_in, double c_out, std::uint64_t seed, bool balanced) {
        SbmSample s = sample_sbm(params_from(q, n, c_in, c_out), seed, balanced);
        return py::make_tuple(std::move(s.graph), std::move(s.labels));
      },
      py::arg("q"), py::arg("n"), py::arg("c_in"), py::arg("c_out"), py::arg("seed"), py::arg("balanced") = false);

  m.def(
      "run_bp",
      [](const Graph& g, std::size_t q, double c_in, double c_out, const std::string& init, std::uint64_t seed,
         const Labels& planted, double tol, std::size_t max_sweeps) {
        InitSpec spec;
        spec.mode = init_from(init);
        spec.seed = seed;
        spec.planted = planted;
        BpOptions opts;
        opts.tol = tol;
        opts.max_sweeps = max_sweeps;
        opts.order_seed = derive_seed(seed, 1);
        const BpResult r = run_bp(g, params_from(q, g.num_vertices(), c_in, c_out), spec, opts);
        py::dict d;
        d["labels"] = r.hard_labels;
        d["marginals"] = r.marginals.vertex;
        d["converged"] = r.converged;
        d["sweeps"] = r.sweeps;
        d["bethe_free_energy"] = r.bethe_free_energy;
        return d;
      },
      py::arg("graph"), py::arg("q"), py::arg("c_in"), py::arg("c_out"), py::arg("init") = "random",
      py::arg("seed") = 0, py::arg("planted") = Labels{}, py::arg("tol") = 1e-6, py::arg("max_sweeps") = 1000);

  m.def("overlap", &overlap, py::arg("estimate"), py::arg("truth"), py::arg("q"));

  m.def(
      "nb_spectrum",
      [](const Graph& g, std::size_t k, std::uint64_t seed) {
        const Spectrum s = leading_spectrum(NbOperator(g), k, 1e-10, seed);
        std::vector<cplx> values;
        for (const Eigenpair& ep : s.leading) values.push_back(ep.value);
        return values;
      },
      py::arg("graph"), py::arg("k") = 4, py::arg("seed") = 0);

  m.def(
      "nb_cluster",
      [](const Graph& g, std::size_t q, std::uint64_t seed) {
        NbOperator op(g);
        const Spectrum s = leading_spectrum(op, std::max<std::size_t>(q + 1, 4), 1e-10, seed);
        NbClusterOptions o;
        o.seed = seed;
        return nb_cluster(g, q, s, o).labels;
      },
      py::arg("graph"), py::arg("q"), py::arg("seed") = 0);

  m.def(
      "reconstruction_curve",
      [](double c, double lambda, std::size_t q, const std::vector<std::size_t>& depths, std::size_t trials,
         std::uint64_t seed, const std::string& estimator) {
        CurveOptions o;
        o.estimators = {estimator == "bp" ? Estimator::bp : Estimator::majority};
        py::list out;
        for (const CurvePoint& pt : reconstruction_curve(c, lambda, q, depths, trials, seed, o)) {
          py::dict d;
          d["depth"] = pt.depth;
          d["p_hat"] = pt.p_hat;
          d["std_err"] = pt.std_err;
          d["trials"] = pt.trials;
          out.append(d);
        }
        return out;
      },
      py::arg("c"), py::arg("lam"), py::arg("q"), py::arg("depths"), py::arg("trials"), py::arg("seed"),
      py::arg("estimator") = "majority");

  m.def(
      "second_moment_exact",
      [](std::size_t n, std::size_t q, double c_in, double c_out) {
        return second_moment_exact(n, params_from(q, std::max<std::size_t>(n, 1000), c_in, c_out));
      },
      py::arg("n"), py::arg("q"), py::arg("c_in"), py::arg("c_out"));

  m.def(
      "maximize_rate",
      [](double c, double lambda, std::size_t q, std::uint64_t seed) {
        RateOptions o;
        o.seed = seed;
        const RateMax r = maximize_rate(c, lambda, q, o);
        return py::make_tuple(r.f_star, r.alpha.entries());
      },
      py::arg("c"), py::arg("lam"), py::arg("q"), py::arg("seed") = 0);

  m.def(
      "min_bisection",
      [](const Graph& g, std::uint64_t seed) {
        const Bisection b = min_bisection_local_search(g, seed);
        return py::make_tuple(b.side, b.cut);
      },
      py::arg("graph"), py::arg("seed"));
}
