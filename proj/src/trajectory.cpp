#include "lvim/trajectory.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lvim/cheb_ops.hpp"
#include "lvim/errors.hpp"

namespace lvim {

Eigen::VectorXd DenseSegment::evaluate(double t) const {
    switch (kind) {
        case Kind::chebyshev: {
            const double tau = 2.0 * (t - t_begin) / (t_end - t_begin) - 1.0;
            return evaluate_chebyshev(coeffs, tau);
        }
        case Kind::dopri: {
            const double theta = (t - t_begin) / (t_end - t_begin);
            const double theta1 = 1.0 - theta;
            return coeffs.col(0) +
                   theta * (coeffs.col(1) +
                            theta1 * (coeffs.col(2) + theta * (coeffs.col(3) + theta1 * coeffs.col(4))));
        }
    }
    return {};
}

long Trajectory::total_iterations() const {
    return std::accumulate(segment_iterations.begin(), segment_iterations.end(), 0L);
}

Eigen::VectorXd Trajectory::component(int index) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) out[static_cast<Eigen::Index>(i)] = states[i][index];
    return out;
}

Eigen::VectorXd Trajectory::state_at(double t) const {
    if (empty() || !(t >= t_begin() && t <= t_end())) {
        throw OutOfRange("trajectory sample time " + std::to_string(t) + " outside [" +
                         (empty() ? std::string("empty") : std::to_string(t_begin()) + ", " +
                                                               std::to_string(t_end())) +
                         "]");
    }
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it != times.end() && *it == t) {
        return states[static_cast<std::size_t>(it - times.begin())];
    }
    if (dense.empty()) {
        throw InvalidArgument("trajectory has no dense output; cannot sample between stored times");
    }
    auto seg = std::lower_bound(dense.begin(), dense.end(), t,
                                [](const DenseSegment& s, double v) { return s.t_end < v; });
    if (seg == dense.end()) seg = std::prev(dense.end());
    return seg->evaluate(t);
}

Eigen::MatrixXd sample_at(const Trajectory& traj, std::span<const double> times) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(times.size()), traj.dim());
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = traj.state_at(times[i]).transpose();
    }
    return out;
}

}  // namespace lvim
