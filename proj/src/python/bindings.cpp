#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "json.hpp"
#include "onefactor/error.hpp"
#include "onefactor/generators.hpp"
#include "onefactor/graph.hpp"
#include "onefactor/io.hpp"
#include "onefactor/nibble.hpp"
#include "onefactor/oracle.hpp"
#include "onefactor/pipeline.hpp"

namespace py = pybind11;
using namespace onefactor;

namespace {

using PyEdges = std::vector<std::pair<Vertex, Vertex>>;
using PyFactorization = std::vector<PyEdges>;

PyEdges to_py(const std::vector<Edge>& es) {
  PyEdges out;
  out.reserve(es.size());
  for (const Edge& e : es) out.emplace_back(e.u, e.v);
  return out;
}

PyFactorization to_py(const Factorization& f) {
  PyFactorization out;
  for (const auto& m : f.matchings) out.push_back(to_py(m.edges));
  return out;
}

Factorization from_py(const PyFactorization& f) {
  Factorization out;
  for (const auto& m : f) {
    std::vector<Edge> es;
    for (auto [u, v] : m) es.emplace_back(u, v);
    out.matchings.emplace_back(std::move(es));
  }
  return out;
}

py::int_ big(const BigInt& v) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(v.str().c_str(), nullptr, 10));
}

py::object parse_json(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "1-factorizations of dense regular graphs";

  static py::exception<Error> exc(m, "OneFactorError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(exc)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::size_t n, const PyEdges& edges) {
             return Graph::from_edge_list(n, std::span<const std::pair<Vertex, Vertex>>(edges));
           }),
           py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &Graph::num_vertices)
      .def_property_readonly("m", &Graph::num_edges)
      .def("edges", [](const Graph& g) { return to_py(g.edges()); })
      .def("degree", &Graph::degree)
      .def("has_edge", py::overload_cast<Vertex, Vertex>(&Graph::has_edge, py::const_))
      .def("is_regular", &Graph::is_regular)
      .def("to_text", [](const Graph& g) { return edge_list_text(g); })
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.num_vertices()) + ", m=" + std::to_string(g.num_edges()) + ")";
      });

  m.def("complete_graph", &complete_graph, py::arg("n"));
  m.def("random_regular",
        [](std::size_t n, std::size_t d, std::uint64_t seed) { return random_regular(n, d, seed); },
        py::arg("n"), py::arg("d"), py::arg("seed") = 0);
  m.def("parse_edge_list", [](const std::string& text) {
    std::istringstream in(text);
    return read_edge_list(in);
  });

  m.def("verify",
        [](const Graph& g, const PyFactorization& f) {
          VerifyReport r = verify_factorization(g, from_py(f), true);
          return py::make_tuple(r.ok, std::string(to_string(r.violation)));
        },
        py::arg("graph"), py::arg("factorization"));
  m.def("canonical_hash", [](const PyFactorization& f) { return canonical_hash(from_py(f)); });

  m.def(
      "factorize",
      [](const Graph& g, std::uint64_t seed, bool degenerate, std::size_t K, double epsilon, double p,
         double tau_nibble) {
        RunConfig cfg;
        cfg.seed = seed;
        cfg.degenerate_mode = degenerate;
        cfg.K = degenerate ? 1 : K;
        cfg.epsilon = epsilon;
        cfg.p = degenerate ? 1.0 : p;
        cfg.tau_nibble = tau_nibble;
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run(g, cfg);
        }
        return py::make_tuple(to_py(r.factorization), parse_json(report_to_json(r, cfg)));
      },
      py::arg("graph"), py::arg("seed") = 0, py::arg("degenerate") = false, py::arg("K") = 2,
      py::arg("epsilon") = 0.08, py::arg("p") = 0.25, py::arg("tau_nibble") = 0.2);

  m.def("count_perfect_matchings", [](const Graph& g) { return count_perfect_matchings(g); });
  m.def(
      "count_factorizations",
      [](const Graph& g, bool ordered) {
        return big(count_one_factorizations(g, ordered ? CountMode::Ordered : CountMode::Unordered));
      },
      py::arg("graph"), py::arg("ordered") = false);
  m.def("permanent", [](const std::vector<std::vector<int>>& a) {
    std::vector<std::vector<char>> c;
    for (const auto& row : a) c.emplace_back(row.begin(), row.end());
    return big(ryser_permanent(c));
  });
  m.def(
      "lower_bound_log",
      [](double n, double d, std::optional<double> C) { return lower_bound_log(n, d, C); },
      py::arg("n"), py::arg("d"), py::arg("C") = py::none());

  m.def(
      "nibble",
      [](const Graph& g, double tau, std::uint64_t seed) {
        NibbleParams params;
        params.tau = tau;
        NibbleOutcome o = run_nibble(g, params, seed);
        PyFactorization classes;
        for (const auto& mm : o.matchings) classes.push_back(to_py(mm.edges));
        return py::make_tuple(classes, to_py(o.leftover));
      },
      py::arg("graph"), py::arg("tau") = 0.1, py::arg("seed") = 0);

#ifdef VERSION_INFO
#define ONEFACTOR_STR(x) #x
#define ONEFACTOR_XSTR(x) ONEFACTOR_STR(x)
  m.attr("__version__") = ONEFACTOR_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
