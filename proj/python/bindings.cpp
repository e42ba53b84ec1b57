#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexfn/archive.hpp"
#include "lexfn/cli.hpp"
#include "lexfn/error.hpp"
#include "lexfn/evaluation.hpp"
#include "lexfn/glf.hpp"
#include "lexfn/params.hpp"
#include "lexfn/tensor.hpp"

namespace py = pybind11;
using namespace lexfn;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

struct Model {
  ParamsStore store;

  static Model load(const std::string& path) { return {load_model(path)}; }

  std::vector<double> apply(const std::string& word, const std::vector<double>& arg0,
                            const std::vector<double>& arg1) const {
    return store.at(word).apply(arg0, arg1);
  }

  std::vector<double> unfurl(const std::string& word) const { return store.at(word).unfurl(); }

  py::list nearest(const std::string& word, std::size_t top) const {
    py::list out;
    for (const auto& s : nearest_neighbors(store, word, top)) out.append(py::make_tuple(s.word, s.score));
    return out;
  }
};

}  // namespace

PYBIND11_MODULE(_lexfn, m) {
  m.doc() = "Adjective matrices and verb tensors trained from phrase vectors";

  static py::exception<Error> base(m, "LexfnError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, (std::string(category_name(e.category())) + ": " + e.what()).c_str());
    }
  });

  m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return cosine(a, b); });

  m.def(
      "spearman",
      [](const std::vector<double>& xs, const std::vector<double>& ys, std::size_t permutations, std::uint64_t seed,
         const std::string& method) {
        SpearmanOptions o;
        o.permutations = permutations;
        o.seed = seed;
        if (method == "t") o.method = PValueMethod::t_approx;
        else if (method != "permutation") throw UsageError("method must be 'permutation' or 't'");
        const auto r = spearman(xs, ys, o);
        return py::make_tuple(r.rho, r.p_value);
      },
      py::arg("xs"), py::arg("ys"), py::arg("permutations") = 10000, py::arg("seed") = 0,
      py::arg("method") = "permutation", "Spearman rho with average ranks and a two-sided p-value.");

  m.def("average_ranks", [](const std::vector<double>& xs) { return average_ranks(xs); });

  m.def(
      "glf_predict",
      [](const std::vector<double>& values, std::size_t noun_dim, std::size_t vector_dim,
         const std::vector<double>& a) {
        return to_vec(glf_predict(GlfTensor(noun_dim, vector_dim, values), a).values());
      },
      py::arg("values"), py::arg("noun_dim"), py::arg("vector_dim"), py::arg("a"),
      "Row-major N x N matrix of a (N, N, D) tensor applied to a word vector.");

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::load, py::arg("path"))
      .def_property_readonly("words", [](const Model& md) { return md.store.words(); })
      .def_property_readonly("kind", [](const Model& md) { return std::string(to_string(md.store.shape().kind)); })
      .def_property_readonly("representation",
                             [](const Model& md) { return std::string(to_string(md.store.shape().rep)); })
      .def_property_readonly("noun_dim", [](const Model& md) { return md.store.shape().noun_dim; })
      .def_property_readonly("output_dim", [](const Model& md) { return md.store.shape().output_dim(); })
      .def("apply", &Model::apply, py::arg("word"), py::arg("arg0"), py::arg("arg1") = std::vector<double>{})
      .def("unfurl", &Model::unfurl, py::arg("word"))
      .def("nearest", &Model::nearest, py::arg("word"), py::arg("top") = 10)
      .def("__len__", [](const Model& md) { return md.store.size(); })
      .def("__contains__", [](const Model& md, const std::string& w) { return md.store.contains(w); });

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command-line invocation in process; returns (exit code, stdout, stderr).");
}
