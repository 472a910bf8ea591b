#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "detpart/config.h"
#include "detpart/hypergraph.h"
#include "detpart/io.h"
#include "detpart/parallel.h"
#include "detpart/partition.h"
#include "detpart/partitioner.h"

namespace py = pybind11;
using namespace detpart;

namespace {

py::dict to_dict(const PartitionResult& r) {
  py::dict times;
  times["coarsening"] = r.times.coarsening;
  times["initial"] = r.times.initial;
  times["jet"] = r.times.jet;
  times["flows"] = r.times.flows;
  times["rebalance"] = r.times.rebalance;
  py::list phases;
  for (const auto& p : r.phase_hashes) phases.append(py::make_tuple(p.phase, hash_to_hex(p.hash)));

  py::dict out;
  out["assignment"] = r.assignment;
  out["metric"] = r.metric;
  out["imbalance"] = r.imbalance;
  out["balanced"] = r.balanced;
  out["levels"] = r.levels;
  out["hash"] = hash_to_hex(partition_hash(r.assignment));
  out["phase_hashes"] = phases;
  out["times"] = times;
  return out;
}

PartitionResult run(const Hypergraph& hg, BlockId k, const std::string& epsilon, std::uint64_t seed, int threads,
                    const std::string& preset, const std::vector<std::string>& overrides) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  Config config = Config::from_preset(preset);
  for (const auto& kv : overrides) config.set(kv);
  config.validate();
  const Rational eps = Rational::parse(epsilon);
  py::gil_scoped_release release;
  const Executor exec(threads);
  return partition_hypergraph(hg, k, eps, seed, config, exec);
}

}  // namespace

PYBIND11_MODULE(_detpart, m) {
  m.doc() = "Deterministic multilevel hypergraph partitioning";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Hypergraph>(m, "Hypergraph")
      .def(py::init([](std::size_t n, std::vector<std::vector<VertexId>> edges, std::vector<Weight> edge_weights,
                       std::vector<Weight> vertex_weights) {
             return Hypergraph::from_edges(n, edges, std::move(edge_weights), std::move(vertex_weights));
           }),
           py::arg("num_vertices"), py::arg("edges"), py::arg("edge_weights") = std::vector<Weight>{},
           py::arg("vertex_weights") = std::vector<Weight>{})
      .def_property_readonly("num_vertices", &Hypergraph::num_vertices)
      .def_property_readonly("num_edges", &Hypergraph::num_edges)
      .def_property_readonly("num_pins", &Hypergraph::num_pins)
      .def_property_readonly("total_vertex_weight", &Hypergraph::total_vertex_weight)
      .def("pins", [](const Hypergraph& hg, EdgeId e) {
        if (e >= hg.num_edges()) throw py::index_error("edge out of range");
        const auto p = hg.pins(e);
        return std::vector<VertexId>(p.begin(), p.end());
      })
      .def("__repr__", [](const Hypergraph& hg) {
        return "<Hypergraph n=" + std::to_string(hg.num_vertices()) + " m=" + std::to_string(hg.num_edges()) +
               " pins=" + std::to_string(hg.num_pins()) + ">";
      });

  m.def("parse_hmetis", py::overload_cast<std::string_view>(&parse_hmetis), py::arg("text"));
  m.def("parse_metis", py::overload_cast<std::string_view>(&parse_metis_graph), py::arg("text"));
  m.def("read_hypergraph", [](const std::string& path, const std::string& format) {
        InputFormat f;
        if (format == "hmetis") f = InputFormat::kHmetis;
        else if (format == "metis") f = InputFormat::kMetis;
        else if (format.empty()) f = detect_format(path);
        else throw std::invalid_argument("unknown format '" + format + "'");
        return read_hypergraph_file(path, f);
      },
      py::arg("path"), py::arg("format") = "");

  m.def("partition", [](const Hypergraph& hg, BlockId k, const std::string& epsilon, std::uint64_t seed, int threads,
                        const std::string& preset, const std::vector<std::string>& overrides) {
        return to_dict(run(hg, k, epsilon, seed, threads, preset, overrides));
      },
      py::arg("hypergraph"), py::arg("k"), py::arg("epsilon") = "0.03", py::arg("seed") = 0, py::arg("threads") = 1,
      py::arg("preset") = "detjet", py::arg("overrides") = std::vector<std::string>{},
      "Partition into k blocks. Returns a dict with assignment, metric, imbalance, balanced, hash, "
      "phase_hashes and times.");

  m.def("connectivity_metric", [](const Hypergraph& hg, const std::vector<BlockId>& assignment) {
        if (assignment.size() != hg.num_vertices()) throw std::invalid_argument("assignment size mismatch");
        return connectivity_metric(hg, assignment);
      },
      py::arg("hypergraph"), py::arg("assignment"));
  m.def("partition_hash", [](const std::vector<BlockId>& assignment) { return hash_to_hex(partition_hash(assignment)); },
        py::arg("assignment"));
  m.def("max_block_weight", [](Weight total, BlockId k, const std::string& epsilon) {
        return max_block_weight(total, k, Rational::parse(epsilon));
      },
      py::arg("total"), py::arg("k"), py::arg("epsilon"));
}
