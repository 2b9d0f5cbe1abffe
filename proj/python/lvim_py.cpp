#include <optional>
#include <span>
#include <string>
#include <utility>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "lvim/gravity.hpp"
#include "lvim/lvim.hpp"
#include "lvim/problems.hpp"
#include "lvim/rk45.hpp"
#include "lvim/shooting.hpp"

namespace py = pybind11;
using namespace lvim;

namespace {

Eigen::MatrixXd stacked_states(const Trajectory& traj) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(traj.size()), traj.dim());
    for (std::size_t i = 0; i < traj.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = traj.states[i].transpose();
    return out;
}

OdeSystem make_system(int dim, RhsFn rhs, std::optional<JacobianFn> jacobian) {
    return OdeSystem(dim, std::move(rhs), jacobian ? std::move(*jacobian) : JacobianFn{});
}

template <typename T>
std::optional<T> pop(py::kwargs& kw, const char* key) {
    if (!kw.contains(key)) return std::nullopt;
    auto value = kw[key].cast<T>();
    PyDict_DelItemString(kw.ptr(), key);
    return value;
}

cli::RunOptions run_options(py::kwargs kw) {
    cli::RunOptions o;
    o.n = pop<int>(kw, "n");
    o.dt = pop<double>(kw, "dt");
    o.tol = pop<double>(kw, "tol");
    o.jacobian = pop<std::string>(kw, "jacobian");
    o.t_end = pop<double>(kw, "t_end");
    o.rel_tol = pop<double>(kw, "rel_tol");
    o.abs_tol = pop<double>(kw, "abs_tol");
    o.gravity_file = pop<std::string>(kw, "gravity_file");
    o.degree = pop<int>(kw, "degree");
    o.load_type = pop<std::string>(kw, "load_type");
    for (auto [k, v] : kw) o.parameters[k.cast<std::string>()] = v.cast<double>();
    return o;
}

}  // namespace

PYBIND11_MODULE(_lvim, m) {
    m.doc() = "Chebyshev collocation integrator with an RK45 oracle";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "LvimError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<OutOfRange>(m, "OutOfRange", PyExc_ValueError);
    py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
    py::register_exception<DomainViolation>(m, "DomainViolation", base.ptr());
    py::register_exception<SingularBasis>(m, "SingularBasis", base.ptr());
    py::register_exception<MarchError>(m, "MarchError", base.ptr());

    m.def("cgl_nodes", &cgl_nodes, py::arg("m"));

    m.def(
        "build_operators",
        [](int n, double t_len, double t_start) {
            const auto ops = build_operators(CollocationGrid(n, t_start, t_len));
            py::dict d;
            d["nodes"] = ops.grid.physical_nodes();
            d["p"] = ops.p;
            d["q"] = ops.q;
            d["h"] = ops.h;
            return d;
        },
        py::arg("n"), py::arg("t_len"), py::arg("t_start") = 0.0,
        "Collocation nodes and the P, Q, H matrices for one segment.");

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("n_basis", &SolverConfig::n_basis)
        .def_readwrite("dt", &SolverConfig::dt)
        .def_readwrite("tol", &SolverConfig::tol)
        .def_readwrite("max_iter", &SolverConfig::max_iter)
        .def_property(
            "jacobian",
            [](const SolverConfig& c) { return std::string(to_string(c.jacobian_mode)); },
            [](SolverConfig& c, const std::string& s) { c.jacobian_mode = parse_jacobian_mode(s); })
        .def("validate", &SolverConfig::validate);

    py::class_<RkConfig>(m, "RkConfig")
        .def(py::init<>())
        .def_readwrite("rel_tol", &RkConfig::rel_tol)
        .def_readwrite("abs_tol", &RkConfig::abs_tol)
        .def_readwrite("h_init", &RkConfig::h_init)
        .def_readwrite("h_max", &RkConfig::h_max)
        .def_readwrite("max_steps", &RkConfig::max_steps)
        .def("validate", &RkConfig::validate);

    m.def("lvim_config_for", [](const std::string& p) { return lvim_config_for(p); }, py::arg("problem"));
    m.def("rk_config_for", [](const std::string& p) { return rk_config_for(p); }, py::arg("problem"));

    py::class_<OdeSystem>(m, "OdeSystem")
        .def(py::init(&make_system), py::arg("dim"), py::arg("rhs"), py::arg("jacobian") = py::none())
        .def_property_readonly("dim", &OdeSystem::dim)
        .def("rhs", &OdeSystem::rhs, py::arg("t"), py::arg("x"))
        .def("jacobian", &OdeSystem::jacobian, py::arg("t"), py::arg("x"))
        .def_property_readonly("evaluations", &OdeSystem::evaluations)
        .def("reset_evaluations", &OdeSystem::reset_evaluations);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times", [](const Trajectory& t) {
            return Eigen::Map<const Eigen::VectorXd>(t.times.data(), static_cast<Eigen::Index>(t.times.size())).eval();
        })
        .def_property_readonly("states", &stacked_states)
        .def_readonly("segment_iterations", &Trajectory::segment_iterations)
        .def_readonly("rounding_floor_segments", &Trajectory::rounding_floor_segments)
        .def_readonly("total_rhs_evals", &Trajectory::total_rhs_evals)
        .def_readonly("accepted_steps", &Trajectory::accepted_steps)
        .def_readonly("rejected_steps", &Trajectory::rejected_steps)
        .def_readonly("wall_time", &Trajectory::wall_time)
        .def_property_readonly("total_iterations", &Trajectory::total_iterations)
        .def("state_at", &Trajectory::state_at, py::arg("t"))
        .def(
            "sample_at",
            [](const Trajectory& t, const std::vector<double>& times) { return sample_at(t, std::span(times)); },
            py::arg("times"))
        .def("__len__", &Trajectory::size);

    m.def("march", &march, py::arg("system"), py::arg("t0"), py::arg("tf"), py::arg("x0"),
          py::arg("config") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());
    m.def("rk45_integrate", &rk45_integrate, py::arg("system"), py::arg("t0"), py::arg("tf"), py::arg("x0"),
          py::arg("config") = RkConfig{}, py::call_guard<py::gil_scoped_release>());

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("name", &ProblemSpec::name)
        .def_readonly("system", &ProblemSpec::system)
        .def_readonly("x0", &ProblemSpec::x0)
        .def_readonly("t0", &ProblemSpec::t0)
        .def_readonly("tf", &ProblemSpec::tf)
        .def_readonly("lvim_defaults", &ProblemSpec::lvim_defaults)
        .def_readonly("rk_defaults", &ProblemSpec::rk_defaults)
        .def_readonly("time_name", &ProblemSpec::time_name)
        .def_readonly("state_names", &ProblemSpec::state_names)
        .def_readonly("notes", &ProblemSpec::notes)
        .def(
            "solve",
            [](const ProblemSpec& p, std::optional<SolverConfig> c) {
                return march(p.system, p.t0, p.tf, p.x0, c.value_or(p.lvim_defaults));
            },
            py::arg("config") = py::none(), py::call_guard<py::gil_scoped_release>())
        .def(
            "oracle",
            [](const ProblemSpec& p, std::optional<RkConfig> c) {
                return rk45_integrate(p.system, p.t0, p.tf, p.x0, c.value_or(p.rk_defaults));
            },
            py::arg("config") = py::none(), py::call_guard<py::gil_scoped_release>());

    m.def(
        "blasius",
        [](double xi_max, bool rk_stage) {
            auto pair = blasius_pair(xi_max, rk_stage ? StageSolver::rk : StageSolver::lvim);
            return py::make_tuple(pair.f2_at_0, std::move(pair.problem));
        },
        py::arg("xi_max") = 10.0, py::arg("rk_stage") = false,
        "Two-stage boundary-layer solve. Returns (f''(0), problem).");
    m.def("emden_chandrasekhar", &emden_chandrasekhar, py::arg("xi_start") = 1e-3, py::arg("xi_end") = 8.0);
    m.def("white_dwarf", &white_dwarf, py::arg("c_param") = 0.3, py::arg("eta_start") = 1e-3,
          py::arg("eta_end") = 5.0);
    m.def("mathieu", &mathieu, py::arg("delta") = 0.5, py::arg("epsilon") = 0.1, py::arg("t_end") = 100.0);
    m.def("pendulum", &pendulum, py::arg("g_over_l") = 1.0, py::arg("theta0") = 3.1329, py::arg("t_end") = 50.0);
    m.def("pendulum_energy", &pendulum_energy, py::arg("g_over_l"), py::arg("state"));
    m.def(
        "pendulum_frequency_sweep",
        [](const std::vector<double>& amplitudes, std::optional<SolverConfig> c) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : pendulum_frequency_sweep(amplitudes, c.value_or(lvim_config_for("pendulum")))) {
                out.emplace_back(p.amplitude, p.period, p.frequency);
            }
            return out;
        },
        py::arg("amplitudes"), py::arg("config") = py::none(), "List of (amplitude, period, frequency).");
    m.def(
        "buckled_bar",
        [](const std::string& load_type, double load, double alpha) {
            return buckled_bar(parse_load_type(load_type), load, alpha);
        },
        py::arg("load_type"), py::arg("load"), py::arg("alpha") = 0.0);
    m.def("elastica", &elastica, py::arg("a"), py::arg("c"), py::arg("x_margin") = 1e-3);
    m.def("elastica_regime", &elastica_regime, py::arg("a"), py::arg("c"));
    m.def(
        "leo",
        [](const std::string& gravity_file, int degree) {
            return leo(load_gravity_model(gravity_file).truncated(degree));
        },
        py::arg("gravity_file"), py::arg("degree") = 8);
    m.def("leo_initial_state", &leo_initial_state);

    m.def(
        "gravity_accel",
        [](const std::string& gravity_file, int degree, const Eigen::Vector3d& q) {
            return gravity_accel(load_gravity_model(gravity_file).truncated(degree), q);
        },
        py::arg("gravity_file"), py::arg("degree"), py::arg("position"));

    py::class_<ShotResult>(m, "ShotResult")
        .def_readonly("theta_prime_0", &ShotResult::theta_prime_0)
        .def_readonly("alpha", &ShotResult::alpha)
        .def_readonly("trajectory", &ShotResult::trajectory)
        .def_readonly("residual", &ShotResult::residual)
        .def_readonly("outer_iters", &ShotResult::outer_iters)
        .def_readonly("inner_iters", &ShotResult::inner_iters);

    m.def(
        "solve_buckled_bar",
        [](const std::string& load_type, double load, std::pair<double, double> guesses,
           const std::string& integrator, double tol) {
            ShootConfig cfg;
            cfg.tol = tol;
            if (integrator == "rk") {
                cfg.integrator = ShotIntegrator::rk;
            } else if (integrator != "lvim") {
                throw InvalidArgument("integrator must be lvim or rk, got " + integrator);
            }
            py::gil_scoped_release release;
            return solve_buckled_bar(parse_load_type(load_type), load, guesses, cfg);
        },
        py::arg("load_type"), py::arg("load"), py::arg("guesses"), py::arg("integrator") = "lvim",
        py::arg("tol") = 1e-10);

    m.def(
        "run",
        [](const std::string& problem, bool compare, py::kwargs kw) {
            const auto options = run_options(std::move(kw));
            std::string text;
            {
                py::gil_scoped_release release;
                text = cli::to_json(cli::run_problem(problem, options, compare)).dump();
            }
            return py::module_::import("json").attr("loads")(text);
        },
        py::arg("problem"), py::arg("compare") = false,
        "Run a named problem and return the JSON report as a dict. Keyword arguments mirror the CLI flags.");

    m.def(
        "ops_check",
        [](int n, double dt) {
            const auto r = cli::ops_check(n, dt);
            py::dict d;
            d["n"] = r.n;
            d["dt"] = r.dt;
            d["tolerance"] = r.tolerance;
            d["q_error"] = r.q_error;
            d["p_error"] = r.p_error;
            d["first_rows_zero"] = r.first_rows_zero;
            d["shift_error"] = r.shift_error;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("n"), py::arg("dt") = 1.0);

    m.def("problem_names", &cli::problem_names);
}
