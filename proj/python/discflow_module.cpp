// Python bindings for the main operations: grids, sources, flow designs,
// bound evaluation, direct solves, sweeps, and rendering.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "discflow/render.hpp"
#include "discflow/selftest.hpp"
#include "discflow/sweep.hpp"

namespace py = pybind11;
using namespace discflow;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

py::array_t<double> colloc_to_numpy(const SpectralScalar& phi) {
    const auto& grid = phi.grid();
    auto vals = to_collocation(phi);
    py::array_t<double> out({grid.nr(), grid.ntheta()});
    std::memcpy(out.mutable_data(), vals.data(), vals.size() * sizeof(double));
    return out;
}

py::dict report_to_dict(const BoundReport& r) {
    py::dict d;
    d["pe"] = r.pe;
    d["constraint"] = to_string(r.constraint);
    d["upper"] = r.upper;
    d["residual_flux"] = r.residual_flux;
    d["residual_q"] = r.residual_q;
    d["grad_eta"] = r.grad_eta;
    d["flow_norm"] = r.flow_norm;
    d["lower"] = r.lower ? py::object(py::float_(*r.lower)) : py::none();
    d["exact"] = r.exact ? py::object(py::float_(*r.exact)) : py::none();
    d["delta_star"] = r.delta_star ? py::object(py::float_(*r.delta_star)) : py::none();
    return d;
}

Constraint parse_constraint(const std::string& s) { return constraint_from_string(s); }

}  // namespace

PYBIND11_MODULE(_discflow, m) {
    m.doc() = "Convection designs and cooling bounds for an internally heated disc";

    py::class_<PolarGrid>(m, "PolarGrid")
        .def_property_readonly("nr", &PolarGrid::nr)
        .def_property_readonly("modes", &PolarGrid::modes)
        .def_property_readonly("ntheta", &PolarGrid::ntheta)
        .def_property_readonly("r_nodes",
                               [](const PolarGrid& g) { return to_numpy(g.r_nodes()); })
        .def_property_readonly(
            "quad_weights", [](const PolarGrid& g) { return to_numpy(g.quad_weights()); })
        .def("__repr__", [](const PolarGrid& g) {
            std::ostringstream ss;
            ss << "PolarGrid(nr=" << g.nr() << ", modes=" << g.modes() << ")";
            return ss.str();
        });

    m.def("make_grid", &make_grid, py::arg("nr"), py::arg("modes"),
          py::arg("stretch_exponent") = 2.0);

    py::class_<SpectralScalar>(m, "Field")
        .def("to_collocation", &colloc_to_numpy)
        .def_property_readonly("grid", &SpectralScalar::grid,
                               py::return_value_policy::reference_internal);

    m.def(
        "sample_field",
        [](const PolarGrid& grid, const std::function<double(double, double)>& fn) {
            return sample_field(grid, fn);
        },
        py::arg("grid"), py::arg("fn"), py::keep_alive<0, 1>(),
        "Sample fn(r, theta) onto a spectral field");
    m.def("mean_over_disc", &mean_over_disc);
    m.def("l2_mean_square", &l2_mean_square);
    m.def("grad_mean_square", &grad_mean_square);
    m.def("theta_average",
          [](const SpectralScalar& phi) { return to_numpy(theta_average(phi)); });

    py::class_<Source>(m, "Source")
        .def_property_readonly("name", &Source::name)
        .def_property_readonly("mean", &Source::mean)
        .def_property_readonly("c0", &Source::c0)
        .def("sample_f", &Source::sample_f, py::keep_alive<0, 1>())
        .def("sample_g", &Source::sample_g, py::keep_alive<0, 1>())
        .def_property_readonly("flux_profile",
                               [](const Source& s) { return to_numpy(s.flux_profile()); });

    m.def("make_source",
          static_cast<Source (*)(const std::string&, const PolarGrid&)>(&make_source),
          py::arg("spec"), py::arg("grid"), py::keep_alive<0, 2>());

    py::class_<BranchingPlan>(m, "BranchingPlan")
        .def_readonly("n", &BranchingPlan::n)
        .def_readonly("l", &BranchingPlan::l)
        .def_readonly("inv_l", &BranchingPlan::inv_l)
        .def_readonly("r", &BranchingPlan::r)
        .def_readonly("delta_bulk", &BranchingPlan::delta_bulk)
        .def_readonly("delta_bl", &BranchingPlan::delta_bl)
        .def_readonly("r_core", &BranchingPlan::r_core)
        .def("ell", &BranchingPlan::ell)
        .def("m_estimate", &BranchingPlan::m_estimate);

    m.def("branching_plan", &branching_plan, py::arg("pe"));

    py::class_<FlowDesign>(m, "FlowDesign")
        .def_property_readonly("kind",
                               [](const FlowDesign& d) { return to_string(d.kind()); })
        .def_property_readonly("enstrophy", &FlowDesign::enstrophy)
        .def_property_readonly("energy", &FlowDesign::energy)
        .def_property_readonly("grad_eta", &FlowDesign::grad_eta)
        .def_property_readonly("psi", &FlowDesign::psi)
        .def_property_readonly("eta", &FlowDesign::eta)
        .def_property_readonly(
            "plan",
            [](const FlowDesign& d) -> py::object {
                return d.plan() ? py::cast(*d.plan()) : py::none();
            });

    m.def("roll_flow", &roll_flow, py::arg("source"), py::arg("n"),
          py::arg("taper") = 0.0, py::keep_alive<0, 1>());
    m.def("branching_flow", &branching_flow, py::arg("source"), py::arg("plan"),
          py::keep_alive<0, 1>());
    m.def("energy_roll_design", &energy_roll_design, py::arg("source"), py::arg("pe"),
          py::keep_alive<0, 1>());
    m.def("rescale_to_pe",
          [](const FlowDesign& d, double pe, const std::string& constraint) {
              return rescale_to_pe(d, pe,
                                   parse_constraint(constraint) == Constraint::energy);
          },
          py::arg("design"), py::arg("pe"), py::arg("constraint") = "enstrophy",
          py::keep_alive<0, 1>());

    py::class_<PoissonSolver>(m, "PoissonSolver")
        .def(py::init<const PolarGrid&>(), py::keep_alive<1, 2>())
        .def("inv_laplacian_dirichlet", &PoissonSolver::inv_laplacian_dirichlet,
             py::keep_alive<0, 1>())
        .def("hminus1_energy", &PoissonSolver::hminus1_energy)
        .def("qform", &PoissonSolver::qform)
        .def("qform_upper", &PoissonSolver::qform_upper);

    m.def(
        "upper_bound",
        [](const FlowDesign& d, const Source& s, double pe, const std::string& constraint,
           const PoissonSolver& solver) {
            return report_to_dict(upper_bound(d, s, pe, parse_constraint(constraint), solver));
        },
        py::arg("design"), py::arg("source"), py::arg("pe"),
        py::arg("constraint"), py::arg("solver"));
    m.def(
        "lower_bound_certify",
        [](const FlowDesign& d, const Source& s, double pe, const std::string& constraint,
           const PoissonSolver& solver) {
            const auto lb = lower_bound_certify(d, s, pe, parse_constraint(constraint), solver);
            return py::make_tuple(lb.lower, lb.delta_star);
        },
        py::arg("design"), py::arg("source"), py::arg("pe"),
        py::arg("constraint"), py::arg("solver"));
    m.def(
        "decompose_residual",
        [](const FlowDesign& d, const Source& s, const PoissonSolver& solver) {
            const auto dec = decompose_residual(d, s, solver);
            return py::make_tuple(dec.residual_flux, dec.residual_q, dec.lhs);
        },
        py::arg("design"), py::arg("source"), py::arg("solver"));
    m.def(
        "solve_steady",
        [](const FlowDesign& d, const Source& s, double pe, const std::string& constraint,
           const PoissonSolver& solver) {
            const auto sol = solve_steady(d, s, pe, parse_constraint(constraint), solver);
            py::dict out;
            out["T"] = colloc_to_numpy(sol.T);  // owned copy, (nr, ntheta)
            out["cooling"] = sol.cooling;
            out["mean_fT"] = sol.mean_fT;
            out["iterations"] = sol.iterations;
            out["residual"] = sol.residual;
            out["lambda"] = sol.lambda;
            return out;
        },
        py::arg("design"), py::arg("source"), py::arg("pe"), py::arg("constraint"),
        py::arg("solver"));
    m.def(
        "duality_check",
        [](const FlowDesign& d, const Source& s, double pe, const PoissonSolver& solver) {
            const auto rep = duality_check(d, s, pe, solver);
            py::dict out;
            out["exact"] = rep.exact;
            out["eta_value"] = rep.eta_value;
            out["xi_value"] = rep.xi_value;
            out["gap_upper"] = rep.gap_upper;
            out["gap_lower"] = rep.gap_lower;
            return out;
        },
        py::arg("design"), py::arg("source"), py::arg("pe"), py::arg("solver"));

    m.def("render_streamlines",
          [](const FlowDesign& d, const std::string& path) {
              render_streamlines(d, path);
          },
          py::arg("design"), py::arg("path"));
    m.def("azimuthal_sign_changes", &azimuthal_sign_changes, py::arg("design"),
          py::arg("radius"));

    m.def(
        "run_sweep",
        [](const py::dict& config) {
            SweepConfig cfg;
            for (auto item : config)
                cfg.apply_line(py::cast<std::string>(item.first),
                               py::cast<std::string>(py::str(item.second)));
            const SweepTable table = run_sweep(cfg);
            py::list rows;
            for (const auto& row : table.rows) {
                py::dict r = row.ok ? report_to_dict(row.report) : py::dict();
                r["ok"] = row.ok;
                if (!row.error.empty()) r["error"] = row.error;
                rows.append(r);
            }
            py::dict out;
            out["rows"] = rows;
            out["csv"] = to_csv(table);
            return out;
        },
        py::arg("config"),
        "Run a sweep; config keys mirror the CLI/config-file options");
    m.def(
        "fit_scaling",
        [](const std::vector<double>& pe, const std::vector<double>& value,
           const std::string& constraint) {
            const auto fit = fit_scaling_values(pe, value, parse_constraint(constraint));
            py::dict out;
            out["raw_slope"] = fit.raw_slope;
            out["compensated_spread"] = fit.compensated_spread;
            out["r_squared"] = fit.r_squared;
            return out;
        },
        py::arg("pe"), py::arg("value"), py::arg("constraint"));

    m.def("selftest", [] {
        std::ostringstream ss;
        const auto summary = selftest(ss);
        py::dict out;
        out["passed"] = summary.passed;
        out["failed"] = summary.failed;
        out["skipped"] = summary.skipped;
        out["log"] = ss.str();
        return out;
    });
}
