#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "lvim/cheb_ops.hpp"
#include "lvim/errors.hpp"
#include "lvim/gravity.hpp"
#include "lvim/shooting.hpp"

#ifndef LVIM_DATA_DIR
#define LVIM_DATA_DIR "data"
#endif

namespace lvim::cli {

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = {"blasius",     "emden",    "white-dwarf", "mathieu",
                                                   "pendulum",    "buckled-bar", "elastica", "leo"};
    return names;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Problem parameters, their defaults and the flag that sets them.
struct ParamInfo {
    const char* problem;
    const char* key;
    double fallback;
};

const std::vector<ParamInfo>& parameter_table() {
    static const std::vector<ParamInfo> table = {
        {"blasius", "xi_max", 10.0},
        {"emden", "xi_start", 1e-3},
        {"white-dwarf", "c_param", 0.3},
        {"white-dwarf", "eta_start", 1e-3},
        {"mathieu", "delta", 0.5},
        {"mathieu", "epsilon", 0.1},
        {"pendulum", "theta0", 3.1329},
        {"pendulum", "g_over_l", 1.0},
        {"buckled-bar", "load", 50.0},
        {"buckled-bar", "guess_a", std::nan("")},
        {"buckled-bar", "guess_b", std::nan("")},
        {"elastica", "a", 5.0},
        {"elastica", "c", 2.5},
    };
    return table;
}

std::map<std::string, double> resolve_parameters(const std::string& problem, const RunOptions& options) {
    std::map<std::string, double> out;
    for (const auto& p : parameter_table()) {
        if (p.problem == problem) out[p.key] = p.fallback;
    }
    for (const auto& [key, value] : options.parameters) {
        if (!out.count(key)) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            throw InvalidArgument("--" + flag + " does not apply to " + problem);
        }
        out[key] = value;
    }
    if (problem != "leo" && (options.gravity_file || options.degree)) {
        throw InvalidArgument("--gravity-file and --degree only apply to leo");
    }
    if (problem != "buckled-bar" && options.load_type) {
        throw InvalidArgument("--load-type only applies to buckled-bar");
    }
    return out;
}

void apply_overrides(const RunOptions& o, SolverConfig& lvim, RkConfig& rk) {
    if (o.n) lvim.n_basis = *o.n;
    if (o.dt) lvim.dt = *o.dt;
    if (o.tol) lvim.tol = *o.tol;
    if (o.jacobian) lvim.jacobian_mode = parse_jacobian_mode(*o.jacobian);
    if (o.rel_tol) rk.rel_tol = *o.rel_tol;
    if (o.abs_tol) rk.abs_tol = *o.abs_tol;
    lvim.validate();
    rk.validate();
}

std::string default_gravity_file() { return std::string(LVIM_DATA_DIR) + "/gravity_deg8_synthetic.txt"; }

GravityModel load_leo_model(const RunOptions& o) {
    GravityModel model = load_gravity_model(o.gravity_file.value_or(default_gravity_file()));
    if (o.degree) model = model.truncated(*o.degree);
    return model;
}

struct Built {
    ProblemSpec spec;
    std::optional<GravityModel> model;
    std::map<std::string, double> diagnostics;
};

Built build_problem(const std::string& problem, const std::map<std::string, double>& prm, const RunOptions& o) {
    Built b;
    auto t_end_or = [&](double fallback) { return o.t_end.value_or(fallback); };
    if (problem == "blasius") {
        BlasiusPair pair = blasius_pair(prm.at("xi_max"), StageSolver::lvim);
        b.diagnostics["f2_at_0"] = pair.f2_at_0;
        b.spec = o.t_end ? blasius(pair.f2_at_0, *o.t_end) : std::move(pair.problem);
    } else if (problem == "emden") {
        b.spec = emden_chandrasekhar(prm.at("xi_start"), t_end_or(8.0));
    } else if (problem == "white-dwarf") {
        b.spec = white_dwarf(prm.at("c_param"), prm.at("eta_start"), t_end_or(5.0));
    } else if (problem == "mathieu") {
        b.spec = mathieu(prm.at("delta"), prm.at("epsilon"), t_end_or(100.0));
    } else if (problem == "pendulum") {
        b.spec = pendulum(prm.at("g_over_l"), prm.at("theta0"), t_end_or(50.0));
    } else if (problem == "elastica") {
        const double a = prm.at("a");
        const double c = prm.at("c");
        double margin = 1e-3;
        if (o.t_end) {
            margin = 1.0 - *o.t_end / c;
            if (!(margin > 0.0 && margin < 1.0)) throw InvalidArgument("elastica: --t-end must lie in (0, c)");
        }
        b.spec = elastica(a, c, margin);
        b.diagnostics["regime"] = elastica_regime(a, c);
    } else if (problem == "leo") {
        b.model = load_leo_model(o);
        b.spec = leo(*b.model);
        if (o.t_end) b.spec.tf = *o.t_end;
        b.diagnostics["degree"] = b.model->degree;
        b.diagnostics["period_s"] = osculating_period(b.model->mu, b.spec.x0);
    } else {
        throw InvalidArgument("unknown problem '" + problem + "'");
    }
    return b;
}

struct Solved {
    Trajectory traj;
    bool partial = false;
    std::string stop_reason;
};

Solved march_lvim(const ProblemSpec& spec, const SolverConfig& cfg, bool stop_at_domain_edge) {
    Marcher marcher(spec.system, spec.t0, spec.x0, cfg);
    try {
        while (marcher.time() < spec.tf) marcher.advance(spec.tf);
    } catch (const MarchError& e) {
        if (!stop_at_domain_edge || e.kind() != ErrorKind::domain_violation || e.partial().size() < 2) throw;
        return {e.partial(), true, e.what()};
    }
    return {marcher.take_trajectory(), false, {}};
}

std::vector<std::vector<double>> rows_of(const Trajectory& t) {
    std::vector<std::vector<double>> rows;
    rows.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t.times[i]};
        row.insert(row.end(), t.states[i].data(), t.states[i].data() + t.states[i].size());
        rows.push_back(std::move(row));
    }
    return rows;
}

void fill_counts(RunReport& r, const Trajectory& t) {
    r.samples = rows_of(t);
    r.total_iterations = t.total_iterations();
    r.total_rhs_evals = t.total_rhs_evals;
    r.rounding_floor_segments = t.rounding_floor_segments;
}

void fill_comparison(RunReport& r, const Trajectory& lvim_traj, const Trajectory& oracle, double oracle_wall) {
    const Eigen::MatrixXd s = sample_at(oracle, lvim_traj.times);
    std::vector<double> worst(static_cast<std::size_t>(s.cols()), 0.0);
    r.oracle_samples.clear();
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(s.cols()));
        for (Eigen::Index k = 0; k < s.cols(); ++k) {
            row[k] = s(i, k);
            worst[k] = std::max(worst[k], std::abs(lvim_traj.states[i][k] - s(i, k)));
        }
        r.oracle_samples.push_back(std::move(row));
    }
    r.max_discrepancy = worst;
    r.oracle = OracleStats{oracle.accepted_steps, oracle.rejected_steps, oracle.total_rhs_evals, oracle_wall};
    if (r.total_iterations > 0) {
        r.diagnostics["oracle_step_ratio"] =
            double(oracle.accepted_steps + oracle.rejected_steps) / double(r.total_iterations);
    }
    if (r.total_rhs_evals > 0) {
        r.diagnostics["oracle_eval_ratio"] = double(oracle.total_rhs_evals) / double(r.total_rhs_evals);
    }
}

double max_relative_drift(const Trajectory& t, const std::function<double(const Eigen::VectorXd&)>& energy) {
    const double e0 = energy(t.states.front());
    double worst = 0.0;
    for (const auto& x : t.states) worst = std::max(worst, std::abs(energy(x) - e0));
    return worst / std::max(std::abs(e0), std::numeric_limits<double>::min());
}

void add_problem_diagnostics(RunReport& r, const Built& b, const std::map<std::string, double>& prm,
                             const Trajectory& t) {
    const std::string& p = r.problem;
    if (p == "pendulum") {
        const double g = prm.at("g_over_l");
        r.diagnostics["energy_drift"] =
            max_relative_drift(t, [g](const Eigen::VectorXd& x) { return pendulum_energy(g, x); });
    } else if (p == "leo") {
        const GravityModel& m = *b.model;
        r.diagnostics["energy_drift"] =
            max_relative_drift(t, [&m](const Eigen::VectorXd& x) { return orbital_energy(m, x); });
        const Eigen::VectorXd& end = t.states.back();
        r.diagnostics["closure_m"] = (end.head<3>() - t.states.front().head<3>()).norm();
    } else if (p == "mathieu") {
        const double span = t.t_end() - t.t_begin();
        double early = 0.0;
        double late = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t.times[i] <= t.t_begin() + 0.2 * span) early = std::max(early, std::abs(t.states[i][0]));
            if (t.times[i] >= t.t_end() - 0.2 * span) late = std::max(late, std::abs(t.states[i][0]));
        }
        const double growth = late / early;
        r.diagnostics["growth_factor"] = growth;
        r.diagnostics["max_abs_x"] = t.component(0).cwiseAbs().maxCoeff();
        if (growth > 10.0) {
            std::ostringstream msg;
            msg << "warning: unbounded growth, the envelope of x grew by a factor " << growth
                << " between the first and last fifth of the span";
            r.notes.push_back(msg.str());
        }
    } else if (p == "emden") {
        if (t.t_begin() <= 1.0 && t.t_end() >= 1.0) r.diagnostics["psi_at_1"] = t.state_at(1.0)[0];
    } else if (p == "blasius") {
        if (t.t_end() >= 6.0) r.diagnostics["f_prime_at_6"] = t.state_at(6.0)[1];
        r.diagnostics["f_prime_at_end"] = t.states.back()[1];
    } else if (p == "white-dwarf") {
        r.diagnostics["eta_reached"] = t.t_end();
    }
}

void start_report(RunReport& r, const std::string& problem, const ProblemSpec& spec, bool compare,
                  const std::map<std::string, double>& prm) {
    r.problem = problem;
    r.mode = compare ? "compare" : "run";
    for (const auto& [k, v] : prm) {
        if (!std::isnan(v)) r.parameters[k] = v;
    }
    r.columns = {"t"};
    r.columns.insert(r.columns.end(), spec.state_names.begin(), spec.state_names.end());
    if (spec.time_name != "t") r.notes.push_back("t is the independent variable " + spec.time_name);
    if (!spec.notes.empty()) r.notes.push_back(spec.notes);
}

std::pair<double, double> default_bar_slopes(LoadType type, double load, const ShootConfig& cfg) {
    if (type == LoadType::dead && load == 50.0) return default_bar_guesses().first;
    ShootConfig scan = cfg;
    scan.integrator = ShotIntegrator::rk;
    const auto brackets = scan_slope_brackets(type, load, 0.0, 2.0 * std::sqrt(std::max(load, 1.0)), 200, scan);
    return brackets.empty() ? std::make_pair(0.1, 0.2) : brackets.front();
}

RunReport run_bar(const RunOptions& o, const std::map<std::string, double>& prm, bool compare) {
    if (o.t_end) throw InvalidArgument("buckled-bar is solved on s in [0, 1]; --t-end does not apply");
    const LoadType type = parse_load_type(o.load_type.value_or("dead"));
    const double load = prm.at("load");
    ShootConfig cfg;
    apply_overrides(o, cfg.lvim, cfg.rk);
    std::pair<double, double> guesses;
    if (std::isnan(prm.at("guess_a")) != std::isnan(prm.at("guess_b"))) {
        throw InvalidArgument("--guess-a and --guess-b go together");
    }
    guesses = std::isnan(prm.at("guess_a")) ? default_bar_slopes(type, load, cfg)
                                            : std::make_pair(prm.at("guess_a"), prm.at("guess_b"));

    RunReport r;
    const ProblemSpec spec = buckled_bar(type, load, 0.0);
    auto params = prm;
    params["guess_a"] = guesses.first;
    params["guess_b"] = guesses.second;
    start_report(r, "buckled-bar", spec, compare, params);
    r.lvim = cfg.lvim;
    r.rk = cfg.rk;
    r.notes.push_back("counts cover the converged shot");

    const auto start = Clock::now();
    const ShotResult shot = solve_buckled_bar(type, load, guesses, cfg);
    r.wall_time_s = seconds_since(start);
    fill_counts(r, shot.trajectory);
    r.diagnostics["theta_prime_0"] = shot.theta_prime_0;
    r.diagnostics["alpha"] = shot.alpha;
    r.diagnostics["tip_theta"] = shot.trajectory.states.back()[0];
    r.diagnostics["residual"] = shot.residual;
    r.diagnostics["outer_iters"] = shot.outer_iters;
    r.diagnostics["inner_iters"] = shot.inner_iters;

    if (compare) {
        ShootConfig rk_cfg = cfg;
        rk_cfg.integrator = ShotIntegrator::rk;
        const auto rk_start = Clock::now();
        const ShotResult oracle = solve_buckled_bar(type, load, guesses, rk_cfg);
        fill_comparison(r, shot.trajectory, oracle.trajectory, seconds_since(rk_start));
        r.diagnostics["oracle_theta_prime_0"] = oracle.theta_prime_0;
    }
    return r;
}

}  // namespace

RunReport run_problem(const std::string& problem, const RunOptions& options, bool compare) {
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown problem '" + problem + "' (valid: " + list + ")");
    }
    const auto prm = resolve_parameters(problem, options);
    if (problem == "buckled-bar") return run_bar(options, prm, compare);

    Built b = build_problem(problem, prm, options);
    SolverConfig lvim_cfg = b.spec.lvim_defaults;
    RkConfig rk_cfg = b.spec.rk_defaults;
    apply_overrides(options, lvim_cfg, rk_cfg);

    RunReport r;
    start_report(r, problem, b.spec, compare, prm);
    r.lvim = lvim_cfg;
    r.rk = rk_cfg;
    r.diagnostics = b.diagnostics;

    const auto start = Clock::now();
    Solved s = march_lvim(b.spec, lvim_cfg, problem == "white-dwarf");
    r.wall_time_s = seconds_since(start);
    if (s.partial) {
        r.status = "partial";
        r.notes.push_back("stopped at the edge of the domain: " + s.stop_reason);
    }
    fill_counts(r, s.traj);
    if (r.rounding_floor_segments) {
        r.notes.push_back(std::to_string(r.rounding_floor_segments) +
                          " segments were accepted at the rounding floor (tol below the attainable precision)");
    }
    add_problem_diagnostics(r, b, prm, s.traj);

    if (compare) {
        const auto rk_start = Clock::now();
        const Trajectory oracle = rk45_integrate(b.spec.system, b.spec.t0, s.traj.t_end(), b.spec.x0, rk_cfg);
        fill_comparison(r, s.traj, oracle, seconds_since(rk_start));
    }
    return r;
}

// ops-check ----------------------------------------------------------------------

double exactness_tolerance(int n, double dt) { return n >= 26 && dt >= 500.0 ? 1e-9 : 1e-12; }

namespace {

double cheb_value(int k, double x) {
    if (x >= 1.0) return 1.0;
    if (x <= -1.0) return k % 2 ? -1.0 : 1.0;
    return std::cos(k * std::acos(x));
}

double cheb_derivative(int k, double x) {
    if (k == 0) return 0.0;
    if (x >= 1.0) return double(k) * k;
    if (x <= -1.0) return (k % 2 ? 1.0 : -1.0) * k * k;
    const double th = std::acos(x);
    return k * std::sin(k * th) / std::sin(th);
}

// Integral of T_k from -1 to x.
double cheb_integral(int k, double x) {
    if (k == 0) return x + 1.0;
    if (k == 1) return 0.5 * (x * x - 1.0);
    auto anti = [k](double y) {
        return cheb_value(k + 1, y) / (2.0 * (k + 1)) - cheb_value(k - 1, y) / (2.0 * (k - 1));
    };
    return anti(x) - anti(-1.0);
}

double normalized_gap(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

double matrix_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace

OpsCheckRow ops_check(int n, double dt) {
    const CollocationGrid grid(n, 0.0, dt);
    const OperatorSet ops = build_operators(grid);
    const Eigen::VectorXd& x = grid.nodes();

    OpsCheckRow row{n, dt, exactness_tolerance(n, dt), 0.0, 0.0, false, 0.0, false};
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd t(n), dt_k(n), it_k(n);
        for (int j = 0; j < n; ++j) {
            t[j] = cheb_value(k, x[j]);
            dt_k[j] = cheb_derivative(k, x[j]);
            it_k[j] = cheb_integral(k, x[j]);
        }
        // d/dtau = (dt/2) d/dt, and the integral over tau is (2/dt) times the one over t
        row.q_error = std::max(row.q_error, normalized_gap(ops.q * t * (dt / 2.0), dt_k));
        row.p_error = std::max(row.p_error, normalized_gap(ops.p * t * (2.0 / dt), it_k));
    }
    row.first_rows_zero = ops.p.row(0).isZero(0.0) && ops.h.row(0).isZero(0.0);
    const OperatorSet far = build_operators(CollocationGrid(n, 1000.0 * dt + 0.37, dt));
    row.shift_error = std::max({matrix_gap(ops.p, far.p), matrix_gap(ops.q, far.q), matrix_gap(ops.h, far.h)});
    row.pass = row.q_error < row.tolerance && row.p_error < row.tolerance && row.first_rows_zero &&
               row.shift_error < row.tolerance;
    return row;
}

// sweeps ---------------------------------------------------------------------------

std::size_t sweep_threads() {
    const char* env = std::getenv("LVIM_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw InvalidArgument(std::string("LVIM_THREADS must be a non-negative integer, got '") + env + "'");
    return v == 0 ? 1 : static_cast<std::size_t>(v);
}

namespace {

SolverConfig sweep_config(const std::string& problem, const RunOptions& o) {
    SolverConfig lvim = lvim_config_for(problem);
    RkConfig rk = rk_config_for(problem);
    apply_overrides(o, lvim, rk);
    return lvim;
}

}  // namespace

CsvTable sweep_pendulum_frequency(const SweepOptions& options, std::size_t threads) {
    std::vector<double> amps = options.amplitudes;
    if (amps.empty()) {
        for (int i = 1; i <= 31; ++i) amps.push_back(0.1 * i);
    }
    const SolverConfig cfg = sweep_config("pendulum", options.solver);
    const auto points = parallel_map(amps.size(), threads, [&](std::size_t i) {
        return pendulum_frequency_sweep({amps[i]}, cfg).front();
    });
    CsvTable table;
    table.header = {"amplitude", "period", "frequency"};
    for (const auto& p : points) table.add_row({p.amplitude, p.period, p.frequency});
    return table;
}

std::vector<CsvTable> sweep_elastica_regimes(const SweepOptions& options, std::size_t threads) {
    std::vector<std::pair<double, double>> pairs;
    if (options.a_values.empty() && options.c_values.empty()) {
        pairs = elastica_default_parameters();
    } else {
        if (options.a_values.size() != options.c_values.size()) {
            throw InvalidArgument("elastica-regimes: --a and --c need the same number of values");
        }
        for (std::size_t i = 0; i < options.a_values.size(); ++i) pairs.emplace_back(options.a_values[i], options.c_values[i]);
    }
    const SolverConfig cfg = sweep_config("elastica", options.solver);
    return parallel_map(pairs.size(), threads, [&](std::size_t i) {
        const auto [a, c] = pairs[i];
        const ProblemSpec spec = elastica(a, c);
        const Trajectory t = march(spec.system, spec.t0, spec.tf, spec.x0, cfg);
        CsvTable table;
        table.header = {"regime", "a", "c", "x", "y"};
        const double regime = elastica_regime(a, c);
        for (std::size_t j = 0; j < t.size(); ++j) table.add_row({regime, a, c, t.times[j], t.states[j][0]});
        return table;
    });
}

CsvTable sweep_bar_load(const SweepOptions& options, std::size_t threads) {
    const LoadType type = parse_load_type(options.load_type);
    std::vector<double> loads = options.loads.empty() ? std::vector<double>{25.0, 50.0} : options.loads;
    ShootConfig cfg;
    RkConfig unused;
    apply_overrides(options.solver, cfg.lvim, unused);
    if (options.guess_a.has_value() != options.guess_b.has_value()) {
        throw InvalidArgument("--guess-a and --guess-b go together");
    }

    struct Job {
        double load;
        std::pair<double, double> guesses;
    };
    std::vector<Job> jobs;
    for (double p : loads) {
        if (options.guess_a) {
            jobs.push_back({p, {*options.guess_a, *options.guess_b}});
        } else if (type == LoadType::dead && p == 50.0) {
            const auto [g1, g2] = default_bar_guesses();
            jobs.push_back({p, g1});
            jobs.push_back({p, g2});
        } else if (type == LoadType::dead) {
            ShootConfig scan = cfg;
            scan.integrator = ShotIntegrator::rk;
            const auto brackets = scan_slope_brackets(type, p, 0.0, 2.0 * std::sqrt(std::max(p, 1.0)), 200, scan);
            if (brackets.empty()) jobs.push_back({p, {0.1, 0.2}});
            for (const auto& br : brackets) jobs.push_back({p, br});
        } else {
            jobs.push_back({p, default_bar_slopes(type, p, cfg)});
        }
    }
    const auto shots = parallel_map(jobs.size(), threads, [&](std::size_t i) {
        return solve_buckled_bar(type, jobs[i].load, jobs[i].guesses, cfg);
    });

    CsvTable table;
    table.header = {"load_type", "P", "solution", "theta_prime_0", "alpha", "s", "theta", "theta_prime"};
    std::map<double, int> solution_index;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        const ShotResult& r = shots[i];
        const int idx = solution_index[jobs[i].load]++;
        for (std::size_t j = 0; j < r.trajectory.size(); ++j) {
            std::vector<std::string> row = {to_string(type), format_number(jobs[i].load), std::to_string(idx),
                                            format_number(r.theta_prime_0), format_number(r.alpha),
                                            format_number(r.trajectory.times[j]),
                                            format_number(r.trajectory.states[j][0]),
                                            format_number(r.trajectory.states[j][1])};
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

// command line ------------------------------------------------------------------

namespace {

void print_defaults(std::ostream& out) {
    out << "problem,n,dt,tol,jacobian,rel_tol,abs_tol\n";
    for (const auto& d : problem_defaults()) {
        out << d.problem << ',' << d.n_basis << ',' << d.dt << ',' << d.tol << ',' << to_string(d.jacobian_mode)
            << ',' << d.rel_tol << ',' << d.abs_tol << '\n';
    }
}

nlohmann::ordered_json table_json(const std::string& name, const CsvTable& table) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (const auto& cell : r) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (!cell.empty() && end == cell.c_str() + cell.size()) {
                row.push_back(v);
            } else {
                row.push_back(cell);
            }
        }
        rows.push_back(std::move(row));
    }
    return {{"table", name}, {"columns", table.header}, {"rows", rows}};
}

// Writes to --out when given, else to `out`.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InvalidArgument("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream(std::ostream& fallback) { return file_.is_open() ? file_ : fallback; }

private:
    std::ofstream file_;
};

void add_solver_flags(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--n", o.n, "Number of basis functions N");
    cmd->add_option("--dt", o.dt, "Segment length");
    cmd->add_option("--tol", o.tol, "LVIM correction tolerance");
    cmd->add_option("--jacobian", o.jacobian, "Jacobian mode")->check(CLI::IsMember({"full", "frozen"}));
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
    add_solver_flags(cmd, o);
    cmd->add_option("--t-end", o.t_end, "End of the integration span");
    cmd->add_option("--rel-tol", o.rel_tol, "RK oracle relative tolerance");
    cmd->add_option("--abs-tol", o.abs_tol, "RK oracle absolute tolerance");
    cmd->add_option("--gravity-file", o.gravity_file, "Gravity coefficient file (leo)");
    cmd->add_option("--degree", o.degree, "Truncate the gravity model to this degree (leo)");
    cmd->add_option("--load-type", o.load_type, "dead|perpendicular|tangent (buckled-bar)");
    for (const auto& p : parameter_table()) {
        std::string flag = std::string("--") + p.key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (cmd->get_option_no_throw(flag)) continue;
        const std::string key = p.key;
        cmd->add_option_function<double>(flag, [&o, key](const double& v) { o.parameters[key] = v; },
                                         std::string("Problem parameter (") + p.problem + ")");
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local variational iteration benchmarks", "lvim"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    bool show_defaults = false;
    std::string out_path;
    std::string format = "csv";
    app.add_flag("--print-defaults", show_defaults, "Print the default solver table and exit");
    app.add_option("--out", out_path, "Output file (default stdout)");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    RunOptions run_opts;
    std::string problem;
    auto* run = app.add_subcommand("run", "Solve a problem with LVIM");
    run->add_option("problem", problem, "Problem name");
    add_run_flags(run, run_opts);

    RunOptions cmp_opts;
    std::optional<double> assert_below;
    auto* cmp = app.add_subcommand("compare", "Solve with LVIM and the RK oracle and report the discrepancy");
    cmp->add_option("problem", problem, "Problem name");
    add_run_flags(cmp, cmp_opts);
    cmp->add_option("--assert-below", assert_below, "Exit 3 if the max discrepancy exceeds this");

    std::vector<int> ops_n;
    std::optional<double> ops_dt;
    auto* ops = app.add_subcommand("ops-check", "Operator self-test");
    ops->add_option("n", ops_n, "Basis sizes (default 5 7 13 26)");
    ops->add_option("--dt", ops_dt, "Segment length (default 0.1 0.5 1 500)");

    SweepOptions sweep_opts;
    std::string sweep_kind;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweeps: pendulum-frequency, elastica-regimes, bar-load");
    sweep->add_option("kind", sweep_kind, "Sweep kind")
        ->check(CLI::IsMember({"pendulum-frequency", "elastica-regimes", "bar-load"}));
    add_solver_flags(sweep, sweep_opts.solver);
    sweep->add_option("--amplitudes", sweep_opts.amplitudes, "Pendulum amplitudes")->delimiter(',');
    sweep->add_option("--a", sweep_opts.a_values, "Elastica a values")->delimiter(',');
    sweep->add_option("--c", sweep_opts.c_values, "Elastica c values")->delimiter(',');
    sweep->add_option("--loads", sweep_opts.loads, "Bar loads P")->delimiter(',');
    sweep->add_option("--load-type", sweep_opts.load_type, "dead|perpendicular|tangent");
    sweep->add_option("--guess-a", sweep_opts.guess_a, "First slope guess");
    sweep->add_option("--guess-b", sweep_opts.guess_b, "Second slope guess");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    if (show_defaults) {
        print_defaults(out);
        return exit_ok;
    }
    if (app.get_subcommands().empty()) {
        err << "a command is required: run, compare, ops-check or sweep\n" << app.help();
        return exit_usage;
    }

    try {
        Sink sink(out_path);
        std::ostream& dest = sink.stream(out);
        std::ostream& summary = out_path.empty() ? err : out;

        if (run->parsed() || cmp->parsed()) {
            if (problem.empty()) {
                err << "missing problem name\n";
                return exit_usage;
            }
            const bool compare = cmp->parsed();
            const RunReport report = run_problem(problem, compare ? cmp_opts : run_opts, compare);
            if (format == "json") {
                dest << to_json(report).dump(2) << '\n';
            } else {
                write_csv(dest, to_table(report));
                write_summary(summary, report);
            }
            if (compare && assert_below && !(report.worst_discrepancy() < *assert_below)) {
                err << "max discrepancy " << report.worst_discrepancy() << " is not below " << *assert_below << '\n';
                return exit_assertion;
            }
            return exit_ok;
        }

        if (ops->parsed()) {
            if (ops_n.empty()) ops_n = {5, 7, 13, 26};
            const std::vector<double> dts = ops_dt ? std::vector<double>{*ops_dt} : std::vector<double>{0.1, 0.5, 1.0, 500.0};
            CsvTable table;
            table.header = {"n", "dt", "tolerance", "q_error", "p_error", "first_rows_zero", "shift_error", "pass"};
            bool all = true;
            for (int n : ops_n) {
                for (double dt : dts) {
                    const OpsCheckRow r = ops_check(n, dt);
                    all = all && r.pass;
                    table.add_row({double(r.n), r.dt, r.tolerance, r.q_error, r.p_error, r.first_rows_zero ? 1.0 : 0.0,
                                   r.shift_error, r.pass ? 1.0 : 0.0});
                }
            }
            if (format == "json") {
                auto j = table_json("ops-check", table);
                j["pass"] = all;
                dest << j.dump(2) << '\n';
            } else {
                write_csv(dest, table);
            }
            if (!all) {
                err << "ops-check: at least one operator test failed\n";
                return exit_self_test;
            }
            return exit_ok;
        }

        if (sweep->parsed()) {
            if (sweep_kind.empty()) {
                err << "missing sweep kind (pendulum-frequency, elastica-regimes, bar-load)\n";
                return exit_usage;
            }
            const std::size_t threads = sweep_threads();
            if (sweep_kind == "elastica-regimes") {
                const auto tables = sweep_elastica_regimes(sweep_opts, threads);
                if (format == "json") {
                    nlohmann::ordered_json j = nlohmann::ordered_json::array();
                    for (const auto& t : tables) j.push_back(table_json(sweep_kind, t));
                    dest << j.dump(2) << '\n';
                } else if (out_path.empty()) {
                    CsvTable all;
                    all.header = tables.front().header;
                    for (const auto& t : tables) all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
                    write_csv(dest, all);
                } else {
                    // one curve file per (a, c): <stem>_<k><ext>
                    const std::filesystem::path base(out_path);
                    for (std::size_t k = 0; k < tables.size(); ++k) {
                        std::filesystem::path p = base;
                        p.replace_filename(base.stem().string() + "_" + std::to_string(k + 1) + base.extension().string());
                        std::ofstream f(p);
                        if (!f) throw InvalidArgument("cannot open '" + p.string() + "' for writing");
                        write_csv(f, tables[k]);
                        out << p.string() << '\n';
                    }
                }
                return exit_ok;
            }
            const CsvTable table = sweep_kind == "pendulum-frequency" ? sweep_pendulum_frequency(sweep_opts, threads)
                                                                      : sweep_bar_load(sweep_opts, threads);
            if (format == "json") {
                dest << table_json(sweep_kind, table).dump(2) << '\n';
            } else {
                write_csv(dest, table);
            }
            return exit_ok;
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const OutOfRange& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_no_convergence;
    }
    return exit_usage;
}

}  // namespace lvim::cli
