#include "lvim/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lvim/errors.hpp"

namespace lvim {

const std::vector<ProblemDefaults>& problem_defaults() {
    static const std::vector<ProblemDefaults> table = {
        {"blasius", 5, 0.5, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"emden", 13, 1.0, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"white-dwarf", 5, 0.1, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"mathieu", 5, 0.5, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"pendulum", 5, 0.1, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"buckled-bar", 7, 0.1, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"elastica", 7, 0.12, 1e-10, JacobianMode::full, 1e-12, 1e-15},
        {"leo", 26, 500.0, 1e-8, JacobianMode::frozen, 1e-12, 1e-15},
    };
    return table;
}

const ProblemDefaults& defaults_for(std::string_view problem) {
    for (const auto& row : problem_defaults()) {
        if (row.problem == problem) return row;
    }
    throw InvalidArgument("no defaults for problem '" + std::string(problem) + "'");
}

SolverConfig lvim_config_for(std::string_view problem) {
    const auto& row = defaults_for(problem);
    SolverConfig cfg;
    cfg.n_basis = row.n_basis;
    cfg.dt = row.dt;
    cfg.tol = row.tol;
    cfg.jacobian_mode = row.jacobian_mode;
    return cfg;
}

RkConfig rk_config_for(std::string_view problem) {
    const auto& row = defaults_for(problem);
    RkConfig cfg;
    cfg.rel_tol = row.rel_tol;
    cfg.abs_tol = row.abs_tol;
    return cfg;
}

namespace {

ProblemSpec make_spec(std::string name, OdeSystem system, Eigen::VectorXd x0, double t0, double tf,
                      std::string_view defaults_key) {
    ProblemSpec spec;
    spec.name = std::move(name);
    spec.system = std::move(system);
    spec.x0 = std::move(x0);
    spec.t0 = t0;
    spec.tf = tf;
    spec.lvim_defaults = lvim_config_for(defaults_key);
    spec.rk_defaults = rk_config_for(defaults_key);
    return spec;
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace

// Blasius ------------------------------------------------------------------------

namespace {

OdeSystem blasius_system() {
    auto rhs = [](double, const Eigen::VectorXd& x) { return vec({x[1], x[2], -0.5 * x[0] * x[2]}); };
    auto jac = [](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 3);
        j(0, 1) = 1.0;
        j(1, 2) = 1.0;
        j(2, 0) = -0.5 * x[2];
        j(2, 2) = -0.5 * x[0];
        return j;
    };
    return OdeSystem(3, rhs, jac);
}

}  // namespace

ProblemSpec blasius_stage1(double xi_max) {
    if (!(xi_max > 0.0)) throw InvalidArgument("blasius: xi_max must be > 0");
    ProblemSpec spec = make_spec("blasius-stage1", blasius_system(), vec({0.0, 0.0, 1.0}), 0.0, xi_max,
                                 "blasius");
    spec.time_name = "xi";
    spec.state_names = {"F", "F_prime", "F_double_prime"};
    spec.notes = "auxiliary initial value problem with F''(0) = 1";
    return spec;
}

ProblemSpec blasius(double f2_at_0, double eta_max) {
    if (!(eta_max > 0.0)) throw InvalidArgument("blasius: eta_max must be > 0");
    ProblemSpec spec =
        make_spec("blasius", blasius_system(), vec({0.0, 0.0, f2_at_0}), 0.0, eta_max, "blasius");
    spec.time_name = "eta";
    spec.state_names = {"f", "f_prime", "f_double_prime"};
    std::ostringstream notes;
    notes.precision(17);
    notes << "f''(0) = " << f2_at_0 << " from the auxiliary problem";
    spec.notes = notes.str();
    return spec;
}

BlasiusPair blasius_pair(double xi_max, StageSolver solver) {
    const ProblemSpec stage1 = blasius_stage1(xi_max);
    const Trajectory traj = solver == StageSolver::lvim
                                ? march(stage1.system, stage1.t0, stage1.tf, stage1.x0, stage1.lvim_defaults)
                                : rk45_integrate(stage1.system, stage1.t0, stage1.tf, stage1.x0,
                                                 stage1.rk_defaults);
    const double f_prime_inf = traj.states.back()[1];
    if (!(f_prime_inf > 0.0)) {
        throw InvalidArgument("blasius: F'(xi_max) <= 0; invalid truncation length");
    }
    const double f2 = std::pow(f_prime_inf, -1.5);
    return {f2, blasius(f2)};
}

// Emden-Chandrasekhar and white dwarf -------------------------------------------

ProblemSpec emden_chandrasekhar(double xi_start, double xi_end) {
    if (!(xi_start > 0.0)) throw InvalidArgument("emden: xi_start must be > 0");
    if (!(xi_end > xi_start)) throw InvalidArgument("emden: xi_end must exceed xi_start");
    auto rhs = [](double xi, const Eigen::VectorXd& x) {
        return vec({x[1], std::exp(-x[0]) - 2.0 * x[1] / xi});
    };
    auto jac = [](double xi, const Eigen::VectorXd& x) {
        Eigen::MatrixXd j(2, 2);
        j << 0.0, 1.0, -std::exp(-x[0]), -2.0 / xi;
        return j;
    };
    const double s = xi_start;
    const Eigen::VectorXd x0 = vec({s * s / 6.0 - std::pow(s, 4) / 120.0, s / 3.0 - s * s * s / 30.0});
    ProblemSpec spec = make_spec("emden", OdeSystem(2, rhs, jac), x0, xi_start, xi_end, "emden");
    spec.time_name = "xi";
    spec.state_names = {"psi", "psi_prime"};
    spec.notes = "started off the xi = 0 singularity from the two-term series";
    return spec;
}

ProblemSpec white_dwarf(double c_param, double eta_start, double eta_end) {
    if (!(c_param >= 0.0 && c_param <= 1.0)) throw InvalidArgument("white-dwarf: C must lie in [0, 1]");
    if (!(eta_start > 0.0)) throw InvalidArgument("white-dwarf: eta_start must be > 0");
    if (!(eta_end > eta_start)) throw InvalidArgument("white-dwarf: eta_end must exceed eta_start");
    auto radicand = [c_param](double eta, const Eigen::VectorXd& x) {
        const double rad = x[0] * x[0] - c_param;
        if (rad < 0.0) {
            std::ostringstream msg;
            msg << "white-dwarf: phi^2 < C at eta = " << eta;
            throw DomainViolation(msg.str(), eta, x);
        }
        return rad;
    };
    auto rhs = [radicand](double eta, const Eigen::VectorXd& x) {
        const double rad = radicand(eta, x);
        return vec({x[1], -rad * std::sqrt(rad) - 2.0 * x[1] / eta});
    };
    auto jac = [radicand](double eta, const Eigen::VectorXd& x) {
        const double rad = radicand(eta, x);
        Eigen::MatrixXd j(2, 2);
        j << 0.0, 1.0, -3.0 * x[0] * std::sqrt(rad), -2.0 / eta;
        return j;
    };
    const double lead = std::pow(1.0 - c_param, 1.5);
    const Eigen::VectorXd x0 =
        vec({1.0 - lead * eta_start * eta_start / 6.0, -lead * eta_start / 3.0});
    ProblemSpec spec =
        make_spec("white-dwarf", OdeSystem(2, rhs, jac), x0, eta_start, eta_end, "white-dwarf");
    spec.time_name = "eta";
    spec.state_names = {"phi", "phi_prime"};
    spec.notes = "integration ends where phi^2 falls below C";
    return spec;
}

// Oscillators --------------------------------------------------------------------

ProblemSpec mathieu(double delta, double epsilon, double t_end) {
    if (!(t_end > 0.0)) throw InvalidArgument("mathieu: t_end must be > 0");
    auto rhs = [delta, epsilon](double t, const Eigen::VectorXd& x) {
        return vec({x[1], -(delta - epsilon * std::cos(t)) * x[0]});
    };
    auto jac = [delta, epsilon](double t, const Eigen::VectorXd&) {
        Eigen::MatrixXd j(2, 2);
        j << 0.0, 1.0, -(delta - epsilon * std::cos(t)), 0.0;
        return j;
    };
    ProblemSpec spec = make_spec("mathieu", OdeSystem(2, rhs, jac), vec({1.0, 0.0}), 0.0, t_end, "mathieu");
    spec.state_names = {"x", "x_dot"};
    return spec;
}

ProblemSpec pendulum(double g_over_l, double theta0, double t_end) {
    if (!(g_over_l > 0.0)) throw InvalidArgument("pendulum: g/l must be > 0");
    if (!(t_end > 0.0)) throw InvalidArgument("pendulum: t_end must be > 0");
    auto rhs = [g_over_l](double, const Eigen::VectorXd& x) {
        return vec({x[1], -g_over_l * std::sin(x[0])});
    };
    auto jac = [g_over_l](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd j(2, 2);
        j << 0.0, 1.0, -g_over_l * std::cos(x[0]), 0.0;
        return j;
    };
    ProblemSpec spec =
        make_spec("pendulum", OdeSystem(2, rhs, jac), vec({theta0, 0.0}), 0.0, t_end, "pendulum");
    spec.state_names = {"theta", "theta_dot"};
    return spec;
}

double pendulum_energy(double g_over_l, const Eigen::VectorXd& state) {
    return 0.5 * state[1] * state[1] - g_over_l * std::cos(state[0]);
}

std::vector<FrequencyPoint> pendulum_frequency_sweep(const std::vector<double>& amplitudes,
                                                     const SolverConfig& config) {
    std::vector<FrequencyPoint> out;
    out.reserve(amplitudes.size());
    for (double amp : amplitudes) {
        if (!(amp > 0.0 && amp < std::numbers::pi)) {
            throw InvalidArgument("pendulum sweep: amplitude must lie in (0, pi)");
        }
        const ProblemSpec spec = pendulum(1.0, amp, 1.0);
        Marcher marcher(spec.system, 0.0, spec.x0, config);
        const double horizon = std::numeric_limits<double>::max();
        // Quarter period: first time theta reaches zero.
        while (marcher.state()[0] > 0.0) {
            marcher.advance(horizon);
            if (marcher.segments() > 1'000'000) throw NoConvergence("pendulum sweep: no zero crossing found");
        }
        const DenseSegment& seg = marcher.trajectory().dense.back();
        double lo = seg.t_begin;
        double hi = seg.t_end;
        for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (seg.evaluate(mid)[0] > 0.0 ? lo : hi) = mid;
        }
        const double period = 4.0 * 0.5 * (lo + hi);
        out.push_back({amp, period, 2.0 * std::numbers::pi / period});
    }
    return out;
}

// Buckled bar --------------------------------------------------------------------

const char* to_string(LoadType type) {
    switch (type) {
        case LoadType::dead: return "dead";
        case LoadType::perpendicular_follower: return "perpendicular";
        case LoadType::tangent_follower: return "tangent";
    }
    return "unknown";
}

LoadType parse_load_type(const std::string& text) {
    if (text == "dead") return LoadType::dead;
    if (text == "perpendicular" || text == "perpendicular-follower") return LoadType::perpendicular_follower;
    if (text == "tangent" || text == "tangent-follower") return LoadType::tangent_follower;
    throw InvalidArgument("unknown load type '" + text + "' (expected dead|perpendicular|tangent)");
}

ProblemSpec buckled_bar(LoadType load_type, double load, double alpha) {
    if (!(load >= 0.0)) throw InvalidArgument("buckled-bar: load must be >= 0");
    const double p = load;
    RhsFn rhs;
    JacobianFn jac;
    auto jac_with = [](double dfdtheta) {
        Eigen::MatrixXd j(2, 2);
        j << 0.0, 1.0, dfdtheta, 0.0;
        return j;
    };
    switch (load_type) {
        case LoadType::dead:
            rhs = [p](double, const Eigen::VectorXd& x) { return vec({x[1], -p * std::sin(x[0])}); };
            jac = [p, jac_with](double, const Eigen::VectorXd& x) { return jac_with(-p * std::cos(x[0])); };
            break;
        case LoadType::perpendicular_follower:
            rhs = [p, alpha](double, const Eigen::VectorXd& x) {
                return vec({x[1], -p * std::cos(x[0] - alpha) * std::sin(x[0])});
            };
            jac = [p, alpha, jac_with](double, const Eigen::VectorXd& x) {
                return jac_with(-p * std::cos(2.0 * x[0] - alpha));
            };
            break;
        case LoadType::tangent_follower:
            rhs = [p, alpha](double, const Eigen::VectorXd& x) {
                return vec({x[1], -p * std::sin(x[0] - alpha) * std::sin(x[0])});
            };
            jac = [p, alpha, jac_with](double, const Eigen::VectorXd& x) {
                return jac_with(-p * std::sin(2.0 * x[0] - alpha));
            };
            break;
    }
    ProblemSpec spec = make_spec("buckled-bar", OdeSystem(2, rhs, jac), vec({0.0, 1.0}), 0.0, 1.0,
                                 "buckled-bar");
    spec.time_name = "s";
    spec.state_names = {"theta", "theta_prime"};
    spec.notes = std::string(to_string(load_type)) + " load; EI = 1, unit length";
    return spec;
}

// Elastica -----------------------------------------------------------------------

namespace {
constexpr double kElasticaSecondBound = 1.651868;
}

int elastica_regime(double a, double c) {
    if (!(a > 0.0) || !(c > 0.0)) return 0;
    if (c < a) return 1;
    if (c > a && c < a * std::sqrt(kElasticaSecondBound)) return 2;
    if (c > a * std::sqrt(kElasticaSecondBound) && c < a * std::sqrt(2.0)) return 3;
    return 0;
}

std::vector<std::pair<double, double>> elastica_default_parameters() {
    return {{5.0, 2.5}, {5.0, 6.0}, {5.0, 6.75}};
}

ProblemSpec elastica(double a, double c, double x_margin) {
    if (!(c > 0.0)) throw InvalidArgument("elastica: c must be > 0");
    if (!(x_margin > 0.0 && x_margin < 1.0)) throw InvalidArgument("elastica: x_margin must lie in (0, 1)");
    auto rhs = [a, c](double x, const Eigen::VectorXd& y) {
        const double outer = c * c - x * x;
        const double inner = 2.0 * a * a - c * c + x * x;
        if (!(std::abs(x) < c) || !(inner > 0.0)) {
            std::ostringstream msg;
            msg << "elastica: outside the domain at x = " << x;
            throw DomainViolation(msg.str(), x, y);
        }
        return vec({(a * a - c * c + x * x) / std::sqrt(outer * inner)});
    };
    auto jac = [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1).eval(); };
    ProblemSpec spec =
        make_spec("elastica", OdeSystem(1, rhs, jac), vec({0.0}), 0.0, c * (1.0 - x_margin), "elastica");
    spec.time_name = "x";
    spec.state_names = {"y"};
    std::ostringstream notes;
    notes << "a = " << a << ", c = " << c << ", regime " << elastica_regime(a, c);
    spec.notes = notes.str();
    return spec;
}

// Low Earth orbit ----------------------------------------------------------------

Eigen::VectorXd leo_initial_state() {
    return vec({-0.3889e6, 7.7388e6, 0.6736e6, -3.5794e3, 0.0, 6.1997e3});
}

double osculating_period(double mu, const Eigen::VectorXd& state) {
    const double r = state.head<3>().norm();
    const double v2 = state.tail<3>().squaredNorm();
    const double energy = 0.5 * v2 - mu / r;
    if (!(energy < 0.0)) throw InvalidArgument("osculating_period: orbit is not bound");
    const double a = -mu / (2.0 * energy);
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / mu);
}

double orbital_energy(const GravityModel& model, const Eigen::VectorXd& state) {
    return 0.5 * state.tail<3>().squaredNorm() - geopotential(model, state.head<3>());
}

ProblemSpec leo(const GravityModel& model) {
    auto rhs = [model](double t, const Eigen::VectorXd& x) {
        Eigen::VectorXd g(6);
        g.head<3>() = x.tail<3>();
        try {
            g.tail<3>() = gravity_accel(model, x.head<3>());
        } catch (const DomainViolation& e) {
            throw DomainViolation(e.what(), t, x);
        }
        return g;
    };
    const double mu = model.mu;
    auto jac = [mu](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(6, 6);
        j.topRightCorner<3, 3>().setIdentity();
        j.bottomLeftCorner<3, 3>() = two_body_gravity_gradient(mu, x.head<3>());
        return j;
    };
    const Eigen::VectorXd x0 = leo_initial_state();
    ProblemSpec spec = make_spec("leo", OdeSystem(6, rhs, jac), x0, 0.0, osculating_period(mu, x0), "leo");
    spec.state_names = {"x", "y", "z", "vx", "vy", "vz"};
    std::ostringstream notes;
    notes << "gravity degree " << model.degree << "; one osculating period";
    spec.notes = notes.str();
    return spec;
}

}  // namespace lvim
