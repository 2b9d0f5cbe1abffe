#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lvim {

/// Continuous representation of the solution over [t_begin, t_end].
struct DenseSegment {
    enum class Kind {
        chebyshev,  // coeffs: N x D Chebyshev series on the mapped segment
        dopri,      // coeffs: D x 5 Dormand-Prince continuous extension
    };
    Kind kind;
    double t_begin;
    double t_end;
    Eigen::MatrixXd coeffs;

    Eigen::VectorXd evaluate(double t) const;
};

/// Ordered (t, x) samples plus solver bookkeeping.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;

    std::vector<int> segment_iterations;  // LVIM: one entry per segment
    std::size_t rounding_floor_segments = 0;  // LVIM: segments stopped at the rounding floor
    std::uint64_t total_rhs_evals = 0;
    std::uint64_t accepted_steps = 0;     // RK oracle
    std::uint64_t rejected_steps = 0;     // RK oracle
    double wall_time = 0.0;               // informational only

    std::vector<DenseSegment> dense;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    int dim() const noexcept { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    long total_iterations() const;

    /// Column `component` of the stored samples.
    Eigen::VectorXd component(int index) const;

    /// State at t: the stored sample if t hits one exactly, else dense output.
    Eigen::VectorXd state_at(double t) const;
};

/// One row per requested time. Throws OutOfRange outside [t_begin, t_end].
Eigen::MatrixXd sample_at(const Trajectory& traj, std::span<const double> times);

}  // namespace lvim
