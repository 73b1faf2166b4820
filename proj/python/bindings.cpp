#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lismimo/errors.hpp"
#include "lismimo/experiment.hpp"
#include "lismimo/network.hpp"
#include "lismimo/precoders.hpp"
#include "lismimo/scenario.hpp"

namespace py = pybind11;
using namespace lismimo;

namespace {

using PosArray = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

PosArray to_array(const PositionList& list) {
  PosArray out(static_cast<Eigen::Index>(list.size()), 3);
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) << list[i].x, list[i].y, list[i].z;
  }
  return out;
}

PositionList to_list(const PosArray& a) {
  PositionList out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back({a(i, 0), a(i, 1), a(i, 2)});
  return out;
}

Geometry make_geometry(const PosArray& lis, const PosArray& ue) {
  Geometry g{to_list(lis), to_list(ue)};
  g.validate();
  return g;
}

Constraints make_constraints(double p_r, double p_l, double sigma2) {
  Constraints c{p_r, p_l, sigma2};
  c.validate();
  return c;
}

py::dict solution_dict(const PrecoderSolution& s) {
  py::dict d;
  d["b"] = s.b;
  d["method"] = std::string(to_string(s.method));
  d["p_t"] = s.achieved_p_t;
  d["p_l"] = s.achieved_p_l;
  d["iterations"] = s.iterations;
  d["converged"] = s.converged;
  if (const auto* m = std::get_if<MfMultipliers>(&s.multipliers)) {
    d["mu1"] = m->mu1;
    d["mu2"] = m->mu2;
    d["alpha"] = m->alpha;
  } else {
    const auto& w = std::get<WmmseScaling>(s.multipliers);
    d["alpha1"] = w.alpha1;
    d["alpha2"] = w.alpha2;
    d["beta"] = w.beta;
  }
  return d;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["n"] = r.n;
  d["m"] = r.m;
  d["sum_capacity"] = r.sum_capacity;
  d["sinr_min"] = r.sinr_min;
  d["sinr_max"] = r.sinr_max;
  d["p_t"] = r.p_t;
  d["p_l"] = r.p_l;
  d["p_rx_total"] = r.p_rx_total;
  d["reference_aperture_power"] = r.reference_aperture_power;
  d["spacing"] = r.spacing;
  d["efficiency"] = r.efficiency;
  d["ue_coupling"] = r.ue_coupling;
  d["scattering"] = r.scattering;
  d["precoder"] = r.precoder;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dipole-array impedance model, channel construction and precoders";
  m.attr("__version__") = LISMIMO_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());

  m.def(
      "mutual_impedance",
      [](double x, double y, double z, double wavelength) {
        return mutual_impedance({x, y, z}, PhysicalConfig(wavelength));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("wavelength") = 1.0);
  m.def(
      "self_impedance_real",
      [](double wavelength) { return self_impedance_real(PhysicalConfig(wavelength)); },
      py::arg("wavelength") = 1.0);

  m.def("linear_array", [](double length, int count) { return to_array(linear_array(length, count)); },
        py::arg("length"), py::arg("count"));
  m.def(
      "planar_array",
      [](double len_y, double len_z, int count_y, int count_z) {
        return to_array(planar_array(len_y, len_z, count_y, count_z));
      },
      py::arg("len_y"), py::arg("len_z"), py::arg("count_y"), py::arg("count_z"));
  m.def(
      "ue_line",
      [](double distance_x, double length, int count) {
        return to_array(ue_line(distance_x, length, count));
      },
      py::arg("distance_x"), py::arg("length"), py::arg("count"));

  m.def(
      "assemble",
      [](const PosArray& lis, const PosArray& ue, double wavelength, double efficiency,
         bool ue_coupling) {
        const PhysicalConfig phys(wavelength);
        const double r_l = loss_resistance_from_efficiency(efficiency, self_impedance_real(phys));
        const auto sys = assemble(make_geometry(lis, ue), phys, r_l, ue_coupling);
        py::dict d;
        d["z_tt"] = sys.z_tt;
        d["z_rt"] = sys.z_rt;
        d["z_rr"] = sys.z_rr;
        d["z0"] = sys.z0;
        d["r_l"] = sys.r_l;
        return d;
      },
      py::arg("lis"), py::arg("ue"), py::arg("wavelength") = 1.0, py::arg("efficiency") = 1.0,
      py::arg("ue_coupling") = true);

  m.def(
      "build_channel",
      [](const PosArray& lis, const PosArray& ue, double wavelength, double efficiency,
         bool ue_coupling, bool scattering) {
        const PhysicalConfig phys(wavelength);
        const double r_l = loss_resistance_from_efficiency(efficiency, self_impedance_real(phys));
        const auto sys = assemble(make_geometry(lis, ue), phys, r_l, ue_coupling);
        const auto ch = build_channel(sys, scattering);
        return py::make_tuple(ch.h, ch.r_p, sys.r_l);
      },
      py::arg("lis"), py::arg("ue"), py::arg("wavelength") = 1.0, py::arg("efficiency") = 1.0,
      py::arg("ue_coupling") = true, py::arg("scattering") = true,
      "Returns (H, R_P, r_l).");

  m.def(
      "precoded_powers",
      [](const CMatrix& b, const RMatrix& r_p, double r_l) {
        const auto p = precoded_powers(b, r_p, r_l);
        return py::make_tuple(p.radiated, p.loss);
      },
      py::arg("b"), py::arg("r_p"), py::arg("r_l"));

  m.def(
      "mf_loss_constrained",
      [](const CMatrix& h, const RMatrix& r_p, double r_l, double p_l) {
        return solution_dict(mf_loss_constrained(h, r_p, r_l, p_l));
      },
      py::arg("h"), py::arg("r_p"), py::arg("r_l"), py::arg("p_l"));
  m.def(
      "mf_radiated_constrained",
      [](const CMatrix& h, const RMatrix& r_p, double r_l, double p_r) {
        return solution_dict(mf_radiated_constrained(h, r_p, r_l, p_r));
      },
      py::arg("h"), py::arg("r_p"), py::arg("r_l"), py::arg("p_r"));
  m.def(
      "mf_dual",
      [](const CMatrix& h, const RMatrix& r_p, double r_l, double p_r, double p_l) {
        return solution_dict(mf_dual(h, r_p, r_l, make_constraints(p_r, p_l, 1.0)));
      },
      py::arg("h"), py::arg("r_p"), py::arg("r_l"), py::arg("p_r") = 1.0, py::arg("p_l") = 1.0);
  m.def(
      "wmmse",
      [](const CMatrix& h, const RMatrix& r_p, double r_l, double p_r, double p_l, double sigma2,
         int max_iter, double tol) {
        const auto constraints = make_constraints(p_r, p_l, sigma2);
        WmmseResult result;
        {
          py::gil_scoped_release release;
          result = wmmse(h, r_p, r_l, constraints, WmmseOptions{max_iter, tol});
        }
        return solution_dict(result.solution);
      },
      py::arg("h"), py::arg("r_p"), py::arg("r_l"), py::arg("p_r") = 1.0, py::arg("p_l") = 1.0,
      py::arg("sigma2") = 1e-8, py::arg("max_iter") = 1000, py::arg("tol") = 1e-8);

  m.def("sinr_per_user", &sinr_per_user, py::arg("h"), py::arg("b"), py::arg("sigma2"));
  m.def("sum_capacity", &sum_capacity, py::arg("sinr"));
  m.def(
      "evaluate_metrics",
      [](const CMatrix& h, const CMatrix& b, const RMatrix& r_p, double r_l, double sigma2,
         double z0) {
        const auto r = evaluate_metrics(h, b, r_p, r_l, sigma2, z0);
        py::dict d;
        d["sinr"] = r.sinr;
        d["sum_capacity"] = r.sum_capacity;
        d["per_ue_rx_power"] = r.per_ue_rx_power;
        d["p_t"] = r.p_t;
        d["p_l"] = r.p_l;
        return d;
      },
      py::arg("h"), py::arg("b"), py::arg("r_p"), py::arg("r_l"), py::arg("sigma2"),
      py::arg("z0") = 1.0);

  m.def(
      "run",
      [](const std::string& scenario_json) { return row_dict(run(parse_scenario(scenario_json))); },
      py::arg("scenario_json"), "Runs a scenario given as a JSON document.");
}
