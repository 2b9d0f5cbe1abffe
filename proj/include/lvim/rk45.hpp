#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include <Eigen/Dense>

#include "lvim/ode_system.hpp"
#include "lvim/trajectory.hpp"

namespace lvim {

struct RkConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
    double h_init = 0.0;  // <= 0 selects the starting step automatically
    double h_max = std::numeric_limits<double>::infinity();
    std::uint64_t max_steps = 5'000'000;

    void validate() const;
};

/// Adaptive Dormand-Prince 5(4) with the mixed absolute/relative max-norm
///   err = max_i |x5_i - x4_i| / (abs_tol + rel_tol max(|x_i|, |x_new_i|)),
/// safety 0.9, step factor clamped to [0.2, 5]. The trajectory holds the
/// accepted steps and a 4th-order continuous extension for each of them;
/// `total_rhs_evals` includes rejected attempts.
Trajectory rk45_integrate(const OdeSystem& system, double t0, double tf, const Eigen::VectorXd& x0,
                          const RkConfig& cfg = {});

}  // namespace lvim
