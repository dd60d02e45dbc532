#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spheremix/approximator.hpp"
#include "spheremix/errors.hpp"
#include "spheremix/io.hpp"
#include "spheremix/special_functions.hpp"
#include "spheremix/spectral.hpp"
#include "spheremix/targets.hpp"
#include "spheremix/vmf.hpp"

namespace py = pybind11;
using namespace spheremix;

namespace {

std::vector<std::vector<double>> to_rows(const std::vector<UnitVector>& points) {
  std::vector<std::vector<double>> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back(p.vector());
  return rows;
}

VmfMixture make_mixture(const std::vector<std::vector<double>>& means, const std::vector<double>& kappas,
                        const std::vector<double>& weights) {
  if (means.empty()) throw DomainError("mixture needs at least one component");
  if (kappas.size() != means.size()) throw DomainError("one kappa per mean required");
  const int m = static_cast<int>(means.front().size()) - 1;
  std::vector<VmfComponent> comps;
  for (std::size_t h = 0; h < means.size(); ++h) comps.push_back({UnitVector(means[h]), kappas[h]});
  return VmfMixture(m, std::move(comps), weights);
}

}  // namespace

PYBIND11_MODULE(_spheremix, m) {
  m.doc() = "von Mises-Fisher mixture approximation of densities on spheres";
  m.attr("__version__") = SPHEREMIX_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NonDensity>(m, "NonDensity", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

  m.def("log_bessel_i", &log_bessel_i, py::arg("v"), py::arg("x"));
  m.def("surface_measure", &surface_measure, py::arg("m"));
  m.def("harmonic_dimension", [](int dim, int k) { return harmonic_dimension({dim, k}); }, py::arg("m"),
        py::arg("k"));
  m.def("gegenbauer_normalized", [](int dim, int k, double t) { return gegenbauer_normalized({dim, k}, t); },
        py::arg("m"), py::arg("k"), py::arg("t"));
  m.def("log_norm_const", &log_norm_const, py::arg("m"), py::arg("kappa"));

  py::class_<VmfMixture>(m, "VmfMixture")
      .def(py::init(&make_mixture), py::arg("means"), py::arg("kappas"), py::arg("weights"))
      .def_property_readonly("m", &VmfMixture::m)
      .def_property_readonly("weights", &VmfMixture::weights)
      .def_property_readonly("kappas",
                             [](const VmfMixture& mix) {
                               std::vector<double> k;
                               for (std::size_t h = 0; h < mix.size(); ++h) k.push_back(mix.kappa(h));
                               return k;
                             })
      .def_property_readonly("means",
                             [](const VmfMixture& mix) {
                               std::vector<std::vector<double>> rows;
                               for (std::size_t h = 0; h < mix.size(); ++h) {
                                 const auto mu = mix.mean(h);
                                 rows.emplace_back(mu.begin(), mu.end());
                               }
                               return rows;
                             })
      .def("__len__", &VmfMixture::size)
      .def("density", [](const VmfMixture& mix, const std::vector<double>& x) { return mix.density(x); })
      .def("densities",
           [](const VmfMixture& mix, const std::vector<std::vector<double>>& xs) {
             std::vector<double> out;
             out.reserve(xs.size());
             for (const auto& x : xs) out.push_back(mix.density(x));
             return out;
           })
      .def("sample", [](const VmfMixture& mix, std::size_t count,
                        std::uint64_t seed) { return to_rows(sample_mixture(mix, count, seed)); },
           py::arg("count"), py::arg("seed") = 0)
      .def("to_json", [](const VmfMixture& mix) { return mixture_to_json(mix).dump(); })
      .def_static("from_json", [](const std::string& s) {
        Json j;
        try {
          j = Json::parse(s);
        } catch (const Json::exception& e) {
          throw FormatError(e.what());
        }
        return mixture_from_json(j);
      });

  m.def(
      "funk_hecke_coefficients",
      [](int dim, double n, int kmax) { return funk_hecke_coefficients(dim, VmfKernel(dim, n).zonal(), kmax).values; },
      py::arg("m"), py::arg("n"), py::arg("kmax"),
      "a_0..a_kmax of the vMF kernel K_n in its normalized-measure form");
  m.def(
      "condition2_tail", [](int dim, double n, double rho) { return condition2_tail(VmfKernel(dim, n), rho); },
      py::arg("m"), py::arg("n"), py::arg("rho"));
  m.def(
      "tail_bound",
      [](int dim, double n, double rho, double delta) { return tail_bound(VmfKernel(dim, n), rho, delta); },
      py::arg("m"), py::arg("n"), py::arg("rho"), py::arg("delta"));
  m.def(
      "lemma1_csv",
      [](int dim, const std::vector<double>& ns, const std::vector<double>& rhos, int kmax) {
        return lemma1_csv(lemma1_report(dim, ns, rhos, kmax));
      },
      py::arg("m"), py::arg("ns"), py::arg("rhos"), py::arg("kmax") = 8);

  m.def(
      "partition_measures",
      [](int dim, const std::vector<int>& levels, const std::string& mode) {
        PartitionOptions opts;
        if (mode == "balanced") {
          opts.mode = PartitionMode::kMeasureBalanced;
        } else if (mode == "graded") {
          opts.mode = PartitionMode::kGraded;
        } else if (mode != "uniform") {
          throw DomainError("unknown partition mode " + mode);
        }
        return build_partition(dim, levels, opts).measures;
      },
      py::arg("m"), py::arg("levels"), py::arg("mode") = "uniform");

  m.def("standard_target_names", &standard_target_names);
  m.def(
      "approximate",
      [](const std::string& target, int dim, double delta, double max_n, std::size_t max_blocks) {
        ApproximationConfig config;
        config.delta = delta;
        config.max_n = max_n;
        config.max_blocks = max_blocks;
        const TargetDensity f = standard_target(target, dim);
        py::gil_scoped_release release;
        return report_to_json(approximate(f, config)).dump();
      },
      py::arg("target"), py::arg("m"), py::arg("delta"), py::arg("max_n") = 512.0, py::arg("max_blocks") = 20000,
      "Runs the approximation engine on a built-in target; returns the report as a JSON string");
  m.def(
      "approximate_mixture",
      [](const VmfMixture& target, double delta, double max_n, std::size_t max_blocks) {
        ApproximationConfig config;
        config.delta = delta;
        config.max_n = max_n;
        config.max_blocks = max_blocks;
        const TargetDensity f = mixture_target(target);
        py::gil_scoped_release release;
        return report_to_json(approximate(f, config)).dump();
      },
      py::arg("target"), py::arg("delta"), py::arg("max_n") = 512.0, py::arg("max_blocks") = 20000);
}
