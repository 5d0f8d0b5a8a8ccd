// Python bindings for the main operations: domains, boundary kernels,
// quadratizing maps, principal-part archives, and algebraicity fits.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdzip/bergman.hpp"
#include "qdzip/domain_io.hpp"
#include "qdzip/gustafsson.hpp"
#include "qdzip/kernels.hpp"
#include "qdzip/testdomains.hpp"
#include "qdzip/zipper.hpp"

namespace py = pybind11;
using namespace qdzip;

PYBIND11_MODULE(qdzip, m) {
  m.doc() = "Boundary kernels, quadrature-domain maps, and kernel archives";

  py::register_exception<IoError>(m, "IoError");
  py::register_exception<ConstructionError>(m, "ConstructionError");
  py::register_exception<AmbiguityError>(m, "AmbiguityError");

  py::class_<Domain>(m, "Domain")
      .def_static("load", &load_domain, py::arg("path"))
      .def_static("parse", &parse_domain, py::arg("json_text"))
      .def_static("disc", &disc_domain, py::arg("grid") = 256,
                  py::arg("radius") = 1.0, py::arg("center") = cplx(0.0))
      .def_static("annulus", &annulus_domain, py::arg("r"), py::arg("grid") = 256)
      .def_static("blob", &blob_domain, py::arg("n_curves"), py::arg("seed"),
                  py::arg("grid"))
      .def_property_readonly("connectivity", &Domain::connectivity)
      .def_property_readonly("grid", &Domain::grid)
      .def_property_readonly("area", &Domain::area)
      .def_property_readonly("diameter", &Domain::diameter)
      .def("contains", &Domain::contains, py::arg("z"))
      .def("distance_to_boundary", &Domain::distance_to_boundary, py::arg("z"))
      .def("to_json", &domain_to_json)
      .def("save", &save_domain, py::arg("path"))
      .def("__repr__", [](const Domain& d) {
        return "<Domain connectivity=" + std::to_string(d.connectivity()) +
               " grid=" + std::to_string(d.grid()) + ">";
      });

  py::class_<SzegoField>(m, "SzegoField")
      .def("__call__", &SzegoField::eval, py::arg("z"))
      .def("derivative", &SzegoField::eval_derivative, py::arg("z"), py::arg("m"))
      .def_property_readonly("at_base", &SzegoField::at_base);

  py::class_<GarabedianField>(m, "GarabedianField")
      .def("__call__", &GarabedianField::eval, py::arg("z"))
      .def_property_readonly("min_boundary_modulus",
                             &GarabedianField::min_boundary_modulus);

  py::class_<AhlforsMap>(m, "AhlforsMap")
      .def("__call__", &AhlforsMap::eval, py::arg("z"))
      .def_property_readonly("derivative_at_base", &AhlforsMap::derivative_at_base)
      .def_property_readonly("max_modulus_defect", &AhlforsMap::max_modulus_defect)
      .def_property_readonly("boundary_winding", &AhlforsMap::boundary_winding);

  py::class_<KernelSolver>(m, "KernelSolver")
      .def(py::init<const Domain&, unsigned>(), py::arg("domain"),
           py::arg("threads") = 1, py::keep_alive<1, 2>())
      .def("szego", &KernelSolver::szego, py::arg("a"), py::keep_alive<0, 1>())
      .def("garabedian", &KernelSolver::garabedian, py::arg("a"),
           py::keep_alive<0, 1>())
      .def("ahlfors", &KernelSolver::ahlfors, py::arg("a"), py::keep_alive<0, 1>())
      .def("szego_zeros", &KernelSolver::szego_zeros, py::arg("a"));

  py::class_<BergmanKernel>(m, "BergmanKernel")
      .def(py::init<const KernelSolver&, unsigned>(), py::arg("solver"),
           py::arg("threads") = 1, py::keep_alive<1, 2>())
      .def("__call__", &BergmanKernel::eval, py::arg("z"), py::arg("w"))
      .def("eval_robust", &BergmanKernel::eval_robust, py::arg("z"), py::arg("w"))
      .def_property_readonly("coupling_asymmetry", &BergmanKernel::coupling_asymmetry)
      .def_property_readonly("collapse_residual", &BergmanKernel::collapse_residual)
      .def_property_readonly("field_count", &BergmanKernel::field_count);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("tol", &FitOptions::tol)
      .def_readwrite("max_terms", &FitOptions::max_terms)
      .def_readwrite("deriv_weight", &FitOptions::deriv_weight)
      .def_readwrite("lattice", &FitOptions::lattice)
      .def_readwrite("cluster_rings", &FitOptions::cluster_rings)
      .def_readwrite("cluster_angles", &FitOptions::cluster_angles)
      .def_readwrite("svd_cutoff", &FitOptions::svd_cutoff);

  py::class_<QuadratureNode>(m, "QuadratureNode")
      .def_readonly("node", &QuadratureNode::node)
      .def_readonly("weights", &QuadratureNode::weights);

  py::class_<QuadratureData>(m, "QuadratureData")
      .def_readonly("nodes", &QuadratureData::nodes)
      .def_readonly("dropped_nodes", &QuadratureData::dropped_nodes)
      .def_readonly("max_order2_coeff", &QuadratureData::max_order2_coeff)
      .def_readonly("radius_sweep_defect", &QuadratureData::radius_sweep_defect);

  py::class_<GustafssonMap>(m, "GustafssonMap")
      .def("__call__", &GustafssonMap::eval, py::arg("z"))
      .def("derivative", &GustafssonMap::derivative, py::arg("z"))
      .def("refl", &GustafssonMap::refl_eval, py::arg("z"))
      .def_property_readonly("base", &GustafssonMap::base)
      .def_property_readonly("id_defect_c1", &GustafssonMap::id_defect_c1)
      .def_property_readonly("boundary_conj_defect",
                             &GustafssonMap::boundary_conj_defect)
      .def_property_readonly("refl_poles", &GustafssonMap::refl_poles)
      .def_property_readonly("szego_zeros", &GustafssonMap::szego_zeros)
      .def_property_readonly(
          "fit_residual",
          [](const GustafssonMap& g) { return g.fit().residual; })
      .def_property_readonly(
          "fit_terms",
          [](const GustafssonMap& g) { return g.fit().points.size(); })
      .def_property_readonly("image",
                             [](const GustafssonMap& g) { return g.image_domain(); });

  m.def(
      "build_map_scattered",
      [](const KernelSolver& s, cplx a, const FitOptions& o) {
        return build_map_scattered(s, a, o);
      },
      py::arg("solver"), py::arg("a"), py::arg("options") = FitOptions{},
      py::keep_alive<0, 1>());
  m.def(
      "build_map_clustered",
      [](const KernelSolver& s, cplx a, cplx w0, double eps, const FitOptions& o) {
        return build_map_clustered(s, a, w0, eps, o);
      },
      py::arg("solver"), py::arg("a"), py::arg("w0"), py::arg("eps"),
      py::arg("options") = FitOptions{}, py::keep_alive<0, 1>());
  m.def("quadrature_data", &quadrature_data, py::arg("map"));
  m.def("verify_quadrature", &verify_quadrature, py::arg("map"), py::arg("data"),
        py::arg("max_degree") = 10);

  py::class_<ZipArchive>(m, "ZipArchive")
      .def_readonly("connectivity", &ZipArchive::connectivity)
      .def_readonly("grid", &ZipArchive::grid)
      .def_readonly("variant", &ZipArchive::variant)
      .def_readonly("base", &ZipArchive::base)
      .def_readonly("raw_bytes", &ZipArchive::raw_bytes)
      .def_readonly("compressed_bytes", &ZipArchive::compressed_bytes)
      .def_property_readonly("h_pole_count",
                             [](const ZipArchive& a) { return a.h_poles.size(); })
      .def_property_readonly("refl_pole_count",
                             [](const ZipArchive& a) { return a.refl_poles.size(); });

  m.def("pack", &pack, py::arg("map"), py::arg("data"));
  m.def("archive_to_json", &archive_to_json, py::arg("archive"));
  m.def("archive_from_json", &archive_from_json, py::arg("text"));
  m.def("archive_image_domain", &archive_image_domain, py::arg("archive"));
  m.def("unzip_h", &unzip_h, py::arg("archive"), py::arg("image"), py::arg("w"));
  m.def("unzip_gprime", &unzip_gprime, py::arg("archive"), py::arg("domain"),
        py::arg("z"));
  m.def("unzip_refl", &unzip_refl, py::arg("archive"), py::arg("domain"),
        py::arg("z"));
  m.def("bergman_pullback_residual", &bergman_pullback_residual, py::arg("archive"),
        py::arg("domain"), py::arg("pairs"), py::arg("threads") = 1);

  py::class_<AlgebraicRelation>(m, "AlgebraicRelation")
      .def_readonly("degree", &AlgebraicRelation::degree)
      .def_readonly("residual", &AlgebraicRelation::residual)
      .def_readonly("sigma_min", &AlgebraicRelation::sigma_min)
      .def_readonly("sigma_max", &AlgebraicRelation::sigma_max)
      .def_readonly("drop", &AlgebraicRelation::drop)
      .def_readonly("decisive", &AlgebraicRelation::decisive)
      .def_readonly("mixed", &AlgebraicRelation::mixed)
      .def("__call__", &AlgebraicRelation::eval, py::arg("u"), py::arg("v"));

  m.def("fit_algebraic_relation", &fit_algebraic_relation, py::arg("samples"),
        py::arg("degree"));
  m.def("fit_relation_search", &fit_relation_search, py::arg("samples"),
        py::arg("max_degree") = 10);
}
