#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "fermarkov/errors.hpp"
#include "fermarkov/markov.hpp"
#include "fermarkov/selftest.hpp"
#include "fermarkov/states.hpp"
#include "fermarkov/sufficiency.hpp"

namespace py = pybind11;
using namespace fermarkov;

namespace {

StateDensity as_state(const Matrix& rho) {
  int n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  if ((Eigen::Index{1} << n) != rho.rows() || rho.rows() != rho.cols()) {
    throw Error(ErrorKind::InvariantViolation, "density must be square with side 2^n");
  }
  return StateDensity(std::make_shared<const CarAlgebra>(n), rho);
}

py::dict ssa_dict(const SsaReport& s) {
  py::dict d;
  d["gap"] = s.gap;
  d["s_total"] = s.s_total;
  d["s_ab"] = s.s_ab;
  d["s_bc"] = s.s_bc;
  d["s_b"] = s.s_b;
  d["saturated"] = s.saturated;
  return d;
}

py::dict analysis_dict(const TripletAnalysis& t) {
  py::dict d;
  d["ssa"] = ssa_dict(t.ssa);
  d["dim_c"] = t.C.size();
  d["dim_b"] = t.B.size();
  d["a_in_c"] = t.a_in_C;
  d["a_in_c_residual"] = t.a_in_C_residual;
  d["even"] = t.even;
  d["parity_defect"] = t.parity_defect;
  d["markov"] = t.markov;
  return d;
}

Tolerances tolerances(double tol_equality, double tol_member, std::uint64_t seed) {
  Tolerances t;
  t.tol_equality = tol_equality;
  t.tol_member = tol_member;
  t.seed = seed;
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Markov triplet analysis of states on finite CAR chains";

  static py::exception<Error> error_type(m, "FermarkovError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<CarAlgebra, std::shared_ptr<CarAlgebra>>(m, "CarAlgebra")
      .def(py::init<int>(), py::arg("n_sites"))
      .def_property_readonly("n_sites", &CarAlgebra::n_sites)
      .def_property_readonly("dim", &CarAlgebra::dim)
      .def("annihilator", &CarAlgebra::annihilator, py::arg("i"))
      .def("creator", &CarAlgebra::creator, py::arg("i"))
      .def("parity_unitary", &CarAlgebra::parity_unitary, py::arg("sites"))
      .def("theta", &CarAlgebra::theta, py::arg("x"))
      .def("even_odd_split", &CarAlgebra::even_odd_split, py::arg("x"))
      .def("cond_expect", &CarAlgebra::cond_expect, py::arg("x"), py::arg("sites"))
      .def("tau", &CarAlgebra::tau, py::arg("x"));

  py::class_<RegionPartition>(m, "Regions")
      .def_static("parse", &RegionPartition::parse, py::arg("n_sites"), py::arg("text"))
      .def_static("contiguous", &RegionPartition::contiguous, py::arg("a"), py::arg("b"),
                  py::arg("c"))
      .def_readonly("A", &RegionPartition::A)
      .def_readonly("B", &RegionPartition::B)
      .def_readonly("C", &RegionPartition::C)
      .def_property_readonly("n_sites", &RegionPartition::n_sites)
      .def("__str__", &RegionPartition::to_string)
      .def("__repr__", [](const RegionPartition& r) { return "Regions('" + r.to_string() + "')"; });

  m.def("vn_entropy", &vn_entropy, py::arg("density"));
  m.def("rel_entropy", [](const Matrix& a, const Matrix& b) { return rel_entropy(a, b); },
        py::arg("rho"), py::arg("sigma"));
  m.def("restrict_density",
        [](const Matrix& rho, const Sites& sites) { return restrict_density(as_state(rho), sites); },
        py::arg("rho"), py::arg("sites"));
  m.def("ssa_gap",
        [](const Matrix& rho, const RegionPartition& r, double tol) {
          return ssa_dict(ssa_gap(as_state(rho), r, tol));
        },
        py::arg("rho"), py::arg("regions"), py::arg("tol_equality") = kTolEquality);

  m.def("analyze",
        [](const Matrix& rho, const RegionPartition& r, double tol_eq, double tol_mem,
           std::uint64_t seed) {
          return analysis_dict(analyze_triplet(as_state(rho), r, tolerances(tol_eq, tol_mem, seed)));
        },
        py::arg("rho"), py::arg("regions"), py::arg("tol_equality") = kTolEquality,
        py::arg("tol_member") = kTolMember, py::arg("seed") = Tolerances{}.seed);

  m.def("factorize",
        [](const Matrix& rho, const RegionPartition& r) {
          const Factorization f = factorize(as_state(rho), r);
          py::dict d;
          d["x"] = f.x;
          d["y"] = f.y;
          d["product_residual"] = f.product_residual;
          d["commute_residual"] = f.commute_residual;
          d["y_even"] = f.y_parity == FactorParity::Even;
          return d;
        },
        py::arg("rho"), py::arg("regions"));

  m.def("decompose",
        [](const Matrix& rho, const RegionPartition& r) {
          const BlockDecomposition b = decompose_even(as_state(rho), r);
          py::list blocks;
          for (const Block& blk : b.blocks) {
            py::dict e;
            e["parity"] = blk.parity == BlockParity::ThetaFixed ? "theta_fixed" : "theta_pair";
            e["projection"] = blk.projection;
            e["x"] = blk.x;
            e["y"] = blk.y;
            e["trace"] = blk.trace;
            blocks.append(e);
          }
          py::dict d;
          d["fixed_count"] = b.fixed_count();
          d["pair_count"] = b.pair_count();
          d["blocks"] = blocks;
          d["reassembly_residual"] = b.reassembly_residual;
          return d;
        },
        py::arg("rho"), py::arg("regions"));

  m.def("is_sufficient",
        [](const Matrix& phi, const Matrix& psi, const Sites& sites) {
          const CarAlgebra alg(as_state(phi).n_sites());
          const SufficiencyReport rep = is_sufficient(phi, psi, region_subalgebra(alg, sites));
          py::dict d;
          d["relent_drop"] = rep.relent_drop;
          d["relent_equal"] = rep.relent_equal;
          d["krylov_residual"] = rep.krylov_residual;
          d["cocycle_member"] = rep.cocycle_member;
          d["petz_difference"] = rep.petz_difference;
          d["petz_equal"] = rep.petz_equal;
          d["sufficient"] = rep.overall;
          return d;
        },
        py::arg("rho_phi"), py::arg("rho_psi"), py::arg("sites"),
        "Sufficiency of the local algebra of `sites` for the pair of densities.");

  m.def("petz_apply",
        [](const Matrix& rho_psi, const Sites& sites, const Matrix& a) {
          const CarAlgebra alg(as_state(rho_psi).n_sites());
          return petz_map(rho_psi, region_subalgebra(alg, sites)).apply(a);
        },
        py::arg("rho_psi"), py::arg("sites"), py::arg("a"));

  m.def("random_state",
        [](int n, std::uint64_t seed, double floor, bool even) {
          return (even ? random_even_state(n, seed, floor) : random_state(n, seed, floor)).rho();
        },
        py::arg("n"), py::arg("seed"), py::arg("floor"), py::arg("even") = false);
  m.def("product_markov",
        [](const RegionPartition& r, std::uint64_t seed, bool noneven) {
          ProductOptions opts;
          opts.parity = noneven ? ProductParity::EvenNonEven : ProductParity::EvenEven;
          return make_product_markov(r, seed, opts).rho();
        },
        py::arg("regions"), py::arg("seed"), py::arg("noneven") = false);
  m.def("block_markov",
        [](const RegionPartition& r, std::uint64_t seed, int k_fixed, int n_pairs) {
          return make_block_markov(r, seed, k_fixed, n_pairs).first.rho();
        },
        py::arg("regions"), py::arg("seed"), py::arg("k_fixed"), py::arg("n_pairs"));

  m.def("selftest",
        [](int max_n) {
          const SelftestReport rep = run_selftest(max_n);
          py::dict worst;
          for (const auto& id : rep.identities) worst[py::str(id.name)] = id.worst;
          return py::make_tuple(rep.ok, worst);
        },
        py::arg("max_n") = 5);
}
