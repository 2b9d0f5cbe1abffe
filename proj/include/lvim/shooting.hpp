#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lvim/lvim.hpp"
#include "lvim/problems.hpp"
#include "lvim/rk45.hpp"
#include "lvim/trajectory.hpp"

namespace lvim {

/// Optional slope window; a secant step that leaves it is replaced by bisection.
struct SlopeWindow {
    double lo;
    double hi;
};

struct ScalarRoot {
    double root;
    double residual;
    int evaluations;
};

/// Secant iteration from two starting guesses until |residual| < tol.
/// Throws NoConvergence after `max_shots` residual evaluations; errors raised
/// by `residual_fn` are rethrown with the offending guess in the message.
ScalarRoot shoot_scalar(const std::function<double(double)>& residual_fn, double guess_a, double guess_b,
                        double tol = 1e-10, int max_shots = 60,
                        std::optional<SlopeWindow> window = std::nullopt);

enum class ShotIntegrator { lvim, rk };

struct ShootConfig {
    double tol = 1e-10;
    int max_shots = 60;
    int max_sweeps = 50;  // outer alpha iterations for follower loads
    double damping = 0.5;
    std::optional<SlopeWindow> window;
    SolverConfig lvim = lvim_config_for("buckled-bar");
    RkConfig rk = rk_config_for("buckled-bar");
    ShotIntegrator integrator = ShotIntegrator::lvim;
};

struct ShotResult {
    double theta_prime_0 = 0.0;
    double alpha = 0.0;  // tip angle theta(1)
    Trajectory trajectory;
    double residual = 0.0;  // |theta'(1)|
    int outer_iters = 0;
    int inner_iters = 0;
};

/// Integrate the bar from theta(0) = 0, theta'(0) = slope over s in [0, 1].
Trajectory integrate_bar(LoadType load_type, double load, double alpha, double slope,
                         const ShootConfig& config);

/// Boundary conditions theta(0) = 0, theta'(1) = 0. Dead load: one secant
/// shoot on theta'(0). Follower loads: damped fixed point on alpha = theta(1)
/// around an inner secant shoot.
ShotResult solve_buckled_bar(LoadType load_type, double load, std::pair<double, double> slope_guesses,
                             const ShootConfig& config = {});

/// Sign changes of theta'(1) over `samples` equally spaced slopes in (0, slope_max],
/// returned as ascending (lo, hi) brackets. alpha is held fixed.
std::vector<std::pair<double, double>> scan_slope_brackets(LoadType load_type, double load, double alpha,
                                                           double slope_max, int samples,
                                                           const ShootConfig& config = {});

/// Two guess pairs that lead to distinct dead-load solutions at P = 50.
std::pair<std::pair<double, double>, std::pair<double, double>> default_bar_guesses();

}  // namespace lvim
