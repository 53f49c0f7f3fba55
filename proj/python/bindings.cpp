#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crawlsim/chain.hpp"
#include "crawlsim/errors.hpp"
#include "crawlsim/moreau_yosida.hpp"
#include "crawlsim/penalized_solver.hpp"
#include "crawlsim/stickslip_oracle.hpp"
#include "crawlsim/vi_checker.hpp"

namespace py = pybind11;
using namespace crawlsim;

namespace {

void export_model(py::module_& m) {
    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init<double, double, double, double>(), py::arg("m1"), py::arg("m2"),
             py::arg("f1"), py::arg("f2"))
        .def_property_readonly("m1", &PhysicalParams::m1)
        .def_property_readonly("m2", &PhysicalParams::m2)
        .def_property_readonly("f1", &PhysicalParams::f1)
        .def_property_readonly("f2", &PhysicalParams::f2)
        .def_property_readonly("total_mass", &PhysicalParams::total_mass);

    py::class_<InitialConditions>(m, "InitialConditions")
        .def(py::init([](double y0, double x10) { return InitialConditions{y0, x10}; }),
             py::arg("y0") = 0.0, py::arg("x10") = 0.0)
        .def_readwrite("y0", &InitialConditions::y0)
        .def_readwrite("x10", &InitialConditions::x10);

    py::class_<GaitState>(m, "GaitState")
        .def_readonly("length", &GaitState::length)
        .def_readonly("rate", &GaitState::rate)
        .def_readonly("accel", &GaitState::accel);

    py::class_<GaitProgram>(m, "GaitProgram")
        .def_static("constant", &GaitProgram::constant, py::arg("length"))
        .def_static("sinusoid", &GaitProgram::sinusoid, py::arg("length"), py::arg("amplitude"),
                    py::arg("omega"), py::arg("phase") = 0.0)
        .def_static("spline",
                    [](const std::vector<std::pair<double, double>>& samples, double s0, double s1) {
                        std::vector<SplineSample> v;
                        for (const auto& [t, l] : samples) v.push_back({t, l});
                        return GaitProgram::spline(std::move(v), s0, s1);
                    },
                    py::arg("samples"), py::arg("start_slope") = 0.0, py::arg("end_slope") = 0.0)
        .def("evaluate", &GaitProgram::evaluate, py::arg("t"))
        .def("period", &GaitProgram::period)
        .def_property_readonly("kind", [](const GaitProgram& g) { return std::string(g.kind()); });

    m.def("contact_force", &contact_force, py::arg("params"), py::arg("accel"), py::arg("F1"),
          py::arg("F2"));
}

void export_regularisation(py::module_& m) {
    py::class_<FrictionPotential>(m, "FrictionPotential")
        .def(py::init<double>(), py::arg("f"))
        .def_property_readonly("friction", &FrictionPotential::friction)
        .def("__call__", &FrictionPotential::operator());

    py::class_<RegularizationIndex>(m, "RegularizationIndex")
        .def(py::init<std::int64_t, std::int64_t>(), py::arg("n1"), py::arg("n2"))
        .def_property_readonly("n1", &RegularizationIndex::n1)
        .def_property_readonly("n2", &RegularizationIndex::n2)
        .def("doubled", &RegularizationIndex::doubled, py::arg("k"));

    m.def("envelope", &envelope, py::arg("pot"), py::arg("n"), py::arg("y"));
    m.def("gradient", &gradient, py::arg("pot"), py::arg("n"), py::arg("y"));
    m.def("resolvent", &resolvent, py::arg("pot"), py::arg("n"), py::arg("xi"));
    m.def("subdifferential",
          [](const FrictionPotential& pot, double y, double v_stick) {
              const auto iv = subdifferential(pot, y, v_stick);
              return std::make_pair(iv.lo, iv.hi);
          },
          py::arg("pot"), py::arg("y"), py::arg("v_stick") = kDefaultStickBand);
    m.def("lemma_bound_margin", &lemma_bound_margin, py::arg("pot"), py::arg("y1"), py::arg("y2"),
          py::arg("n"), py::arg("r"));
    m.def("cauchy_bound", &cauchy_bound, py::arg("f1"), py::arg("f2"), py::arg("n"), py::arg("r"),
          py::arg("t"));
}

void export_solvers(py::module_& m) {
    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("rtol", &SolverConfig::rtol)
        .def_readwrite("atol", &SolverConfig::atol)
        .def_readwrite("h_max", &SolverConfig::h_max)
        .def_readwrite("output_grid", &SolverConfig::output_grid)
        .def_readwrite("stiffness_guard", &SolverConfig::stiffness_guard);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("grid", &Trajectory::grid)
        .def_readonly("y", &Trajectory::y)
        .def_readonly("k", &Trajectory::k)
        .def_readonly("provenance", &Trajectory::provenance);

    py::class_<PenalizedTrajectory>(m, "PenalizedTrajectory")
        .def_readonly("n", &PenalizedTrajectory::n)
        .def_readonly("grid", &PenalizedTrajectory::grid)
        .def_readonly("y", &PenalizedTrajectory::y)
        .def_readonly("k", &PenalizedTrajectory::k)
        .def_readonly("linear_residual", &PenalizedTrajectory::linear_residual)
        .def("to_trajectory", &PenalizedTrajectory::to_trajectory);

    m.def("rhs", &rhs, py::arg("params"), py::arg("gait"), py::arg("n"), py::arg("t"), py::arg("y"));
    m.def("integrate", &integrate, py::arg("params"), py::arg("gait"), py::arg("ic"), py::arg("n"),
          py::arg("horizon"), py::arg("cfg") = SolverConfig{});

    py::class_<RefineOptions>(m, "RefineOptions")
        .def(py::init<>())
        .def_readwrite("n0", &RefineOptions::n0)
        .def_readwrite("epsilon", &RefineOptions::epsilon)
        .def_readwrite("k_max", &RefineOptions::k_max)
        .def_readwrite("parallel", &RefineOptions::parallel);

    py::class_<PairCheck>(m, "PairCheck")
        .def_readonly("n", &PairCheck::n)
        .def_readonly("r", &PairCheck::r)
        .def_readonly("bound", &PairCheck::bound)
        .def_readonly("measured_sup", &PairCheck::measured_sup)
        .def_readonly("within_bound", &PairCheck::within_bound);

    py::class_<Certificate>(m, "Certificate")
        .def_readonly("theoretical_bound", &Certificate::theoretical_bound)
        .def_readonly("measured_sup", &Certificate::measured_sup)
        .def_readonly("epsilon", &Certificate::epsilon)
        .def_readonly("converged", &Certificate::converged)
        .def_readonly("pairs", &Certificate::pairs);

    py::class_<RefineResult>(m, "RefineResult")
        .def_readonly("limit", &RefineResult::limit)
        .def_readonly("runs", &RefineResult::runs)
        .def_readonly("certificate", &RefineResult::certificate);

    m.def("refine", &refine, py::arg("params"), py::arg("gait"), py::arg("ic"), py::arg("horizon"),
          py::arg("cfg") = SolverConfig{}, py::arg("opts") = RefineOptions{},
          py::call_guard<py::gil_scoped_release>());

    py::class_<OracleOptions>(m, "OracleOptions")
        .def(py::init<>())
        .def_readwrite("v_stick", &OracleOptions::v_stick)
        .def_readwrite("a_stick", &OracleOptions::a_stick)
        .def_readwrite("event_scan", &OracleOptions::event_scan)
        .def_readwrite("event_tol", &OracleOptions::event_tol)
        .def_readwrite("zeno_cap", &OracleOptions::zeno_cap)
        .def_readwrite("zeno_window", &OracleOptions::zeno_window);

    py::class_<EventTrajectory>(m, "EventTrajectory")
        .def_readonly("grid", &EventTrajectory::grid)
        .def_readonly("y", &EventTrajectory::y)
        .def_readonly("x1", &EventTrajectory::x1)
        .def_readonly("k1", &EventTrajectory::k1)
        .def_readonly("k2", &EventTrajectory::k2)
        .def_readonly("F1", &EventTrajectory::F1)
        .def_readonly("F2", &EventTrajectory::F2)
        .def_property_readonly("event_times",
                               [](const EventTrajectory& e) {
                                   std::vector<double> t;
                                   for (const auto& ev : e.events) t.push_back(ev.time);
                                   return t;
                               })
        .def("to_trajectory", &EventTrajectory::to_trajectory);

    m.def("simulate_events", &simulate_events, py::arg("params"), py::arg("gait"), py::arg("ic"),
          py::arg("horizon"), py::arg("cfg") = SolverConfig{}, py::arg("opts") = OracleOptions{});
    m.def("net_displacement_per_period",
          py::overload_cast<const EventTrajectory&, const GaitProgram&>(&net_displacement_per_period),
          py::arg("traj"), py::arg("gait"));
    m.def("net_displacement_per_period",
          py::overload_cast<const Trajectory&, const GaitProgram&>(&net_displacement_per_period),
          py::arg("traj"), py::arg("gait"));
}

void export_checks(py::module_& m) {
    py::class_<CheckLine>(m, "CheckLine")
        .def_readonly("name", &CheckLine::name)
        .def_readonly("s", &CheckLine::s)
        .def_readonly("t", &CheckLine::t)
        .def_readonly("residual", &CheckLine::residual)
        .def_readonly("tolerance", &CheckLine::tolerance)
        .def_readonly("passed", &CheckLine::pass);

    py::class_<VerifyOptions>(m, "VerifyOptions")
        .def(py::init<>())
        .def_readwrite("random_windows", &VerifyOptions::random_windows)
        .def_readwrite("seed", &VerifyOptions::seed)
        .def_readwrite("epsilon", &VerifyOptions::epsilon);

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_readonly("lines", &VerificationReport::lines)
        .def_readonly("all_pass", &VerificationReport::all_pass)
        .def_readonly("vi_tol", &VerificationReport::vi_tol)
        .def("worst", &VerificationReport::worst, py::return_value_policy::copy)
        .def("to_text", &VerificationReport::to_text);

    m.def("check_linear_relation", &check_linear_relation, py::arg("traj"), py::arg("params"),
          py::arg("gait"));
    m.def("verify_trajectory", &verify_trajectory, py::arg("traj"), py::arg("params"),
          py::arg("gait"), py::arg("opts") = VerifyOptions{});

    py::class_<ChainSpec>(m, "ChainSpec")
        .def(py::init<std::vector<double>, std::vector<double>, std::vector<GaitProgram>>(),
             py::arg("masses"), py::arg("frictions"), py::arg("links"))
        .def_property_readonly("bodies", &ChainSpec::bodies);
    m.def("chain_rhs",
          [](const ChainSpec& s, const std::vector<std::int64_t>& n, double t, double y) {
              return chain_rhs(s, n, t, y);
          },
          py::arg("spec"), py::arg("n"), py::arg("t"), py::arg("y"));
    m.def("chain_integrate",
          [](const ChainSpec& s, const InitialConditions& ic, const std::vector<std::int64_t>& n,
             double horizon, const SolverConfig& cfg) {
              return chain_integrate(s, ic, n, horizon, cfg);
          },
          py::arg("spec"), py::arg("ic"), py::arg("n"), py::arg("horizon"),
          py::arg("cfg") = SolverConfig{});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-body crawler with dry friction: regularised and event-driven solvers";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    export_model(m);
    export_regularisation(m);
    export_solvers(m);
    export_checks(m);
}
