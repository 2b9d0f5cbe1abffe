#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvim/gravity.hpp"
#include "lvim/lvim.hpp"
#include "lvim/ode_system.hpp"
#include "lvim/rk45.hpp"

namespace lvim {

/// Solver settings each benchmark ships with.
struct ProblemDefaults {
    std::string_view problem;
    int n_basis;
    double dt;
    double tol;
    JacobianMode jacobian_mode;
    double rel_tol;
    double abs_tol;
};

/// The single table of default solver settings, one row per benchmark.
const std::vector<ProblemDefaults>& problem_defaults();
const ProblemDefaults& defaults_for(std::string_view problem);
SolverConfig lvim_config_for(std::string_view problem);
RkConfig rk_config_for(std::string_view problem);

struct ProblemSpec {
    std::string name;
    OdeSystem system;
    Eigen::VectorXd x0;
    double t0 = 0.0;
    double tf = 1.0;
    SolverConfig lvim_defaults;
    RkConfig rk_defaults;
    std::string time_name = "t";
    std::vector<std::string> state_names;
    std::string notes;
};

// Blasius boundary layer -------------------------------------------------------

enum class StageSolver { lvim, rk };

/// The auxiliary problem 2F''' + F F'' = 0, F(0) = F'(0) = 0, F''(0) = 1 on [0, xi_max].
ProblemSpec blasius_stage1(double xi_max = 10.0);

/// 2f''' + f f'' = 0 with f(0) = f'(0) = 0 and the given f''(0), on [0, eta_max].
ProblemSpec blasius(double f2_at_0, double eta_max = 10.0);

struct BlasiusPair {
    double f2_at_0;
    ProblemSpec problem;
};

/// Solve the auxiliary problem with `solver` and return f''(0) = F'(xi_max)^(-3/2)
/// with the resulting Blasius problem.
BlasiusPair blasius_pair(double xi_max = 10.0, StageSolver solver = StageSolver::lvim);

// Isothermal sphere and white dwarf ---------------------------------------------

/// psi'' = exp(-psi) - (2/xi) psi', started at xi_start from the series
/// psi = xi^2/6 - xi^4/120.
ProblemSpec emden_chandrasekhar(double xi_start = 1e-3, double xi_end = 8.0);

/// phi'' = -(phi^2 - C)^(3/2) - (2/eta) phi', phi(0) = 1, started at eta_start
/// from phi = 1 - (1 - C)^(3/2) eta^2 / 6. The rhs raises DomainViolation once
/// phi^2 < C.
ProblemSpec white_dwarf(double c_param = 0.3, double eta_start = 1e-3, double eta_end = 5.0);

// Oscillators -------------------------------------------------------------------

/// x'' + (delta - epsilon cos t) x = 0, x(0) = 1, x'(0) = 0.
ProblemSpec mathieu(double delta = 0.5, double epsilon = 0.1, double t_end = 100.0);

/// theta'' = -(g/l) sin theta, theta(0) = theta0, theta'(0) = 0.
ProblemSpec pendulum(double g_over_l = 1.0, double theta0 = 3.1329, double t_end = 50.0);

/// Pendulum energy 0.5 theta_dot^2 - (g/l) cos theta.
double pendulum_energy(double g_over_l, const Eigen::VectorXd& state);

struct FrequencyPoint {
    double amplitude;
    double period;
    double frequency;
};

/// Frequency of the g/l = 1 pendulum for each amplitude in (0, pi): the first
/// zero of theta is located on the LVIM dense output and the period is four
/// times that quarter period.
std::vector<FrequencyPoint> pendulum_frequency_sweep(const std::vector<double>& amplitudes,
                                                     const SolverConfig& config = lvim_config_for("pendulum"));

// Buckled bar -------------------------------------------------------------------

enum class LoadType { dead, perpendicular_follower, tangent_follower };

const char* to_string(LoadType type);
LoadType parse_load_type(const std::string& text);

/// theta'' = -P f(theta, alpha) on s in [0, 1] with EI = 1. x0 carries a
/// placeholder slope; the shooting solver replaces it.
ProblemSpec buckled_bar(LoadType load_type, double load, double alpha = 0.0);

// Elastica ----------------------------------------------------------------------

/// 1 for 0 < c < a, 2 for a < c < a sqrt(1.651868), 3 for a sqrt(1.651868) < c < a sqrt(2),
/// 0 otherwise (including the boundary cases).
int elastica_regime(double a, double c);

/// dy/dx = (a^2 - c^2 + x^2) / sqrt((c^2 - x^2)(2a^2 - c^2 + x^2)), y(0) = 0,
/// on [0, c (1 - x_margin)].
ProblemSpec elastica(double a, double c, double x_margin = 1e-3);

/// Default (a, c) for each regime.
std::vector<std::pair<double, double>> elastica_default_parameters();

// Low Earth orbit ---------------------------------------------------------------

/// q'' = grad V(q). State [q, q_dot] in m and m/s. The Jacobian uses the
/// point-mass gravity gradient whatever the model degree. Default span is one
/// osculating period of the initial state.
ProblemSpec leo(const GravityModel& model);

/// Initial position and velocity used by `leo`.
Eigen::VectorXd leo_initial_state();

/// Specific energy 0.5 |v|^2 - V(q) for the full model (conserved: the field is static).
double orbital_energy(const GravityModel& model, const Eigen::VectorXd& state);

/// Period 2 pi sqrt(a^3 / mu) of the osculating two-body orbit.
double osculating_period(double mu, const Eigen::VectorXd& state);

}  // namespace lvim
