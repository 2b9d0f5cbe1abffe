#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvim/cheb_ops.hpp"
#include "lvim/errors.hpp"
#include "lvim/ode_system.hpp"
#include "lvim/trajectory.hpp"

namespace lvim {

enum class JacobianMode { full, frozen };

const char* to_string(JacobianMode mode);
JacobianMode parse_jacobian_mode(const std::string& text);

struct SolverConfig {
    int n_basis = 5;
    double dt = 0.1;
    double tol = 1e-10;
    int max_iter = 100;
    JacobianMode jacobian_mode = JacobianMode::full;

    /// Throws InvalidArgument on a bad configuration.
    void validate() const;
};

struct SegmentResult {
    Eigen::MatrixXd node_states;      // M x D, row 0 is the segment's initial state
    int iterations = 0;
    double final_correction = 0.0;    // max-norm of the last update
    double final_residual = 0.0;      // max |Q x - g| at the returned nodes
    bool converged = false;
    bool at_rounding_floor = false;   // stopped above tol because the correction stalled at rounding level
    std::vector<double> corrections;  // max-norm of every update, in order
};

/// Collocation residual Q x - g(t_j, x_j), one row per node.
Eigen::MatrixXd residual(const OperatorSet& ops, const OdeSystem& system,
                         const Eigen::MatrixXd& node_states);

/// Fixed-point iteration x <- x + (J H - P)(Q x - g) with J re-evaluated at
/// every node on every pass.
SegmentResult iterate_segment(const OperatorSet& ops, const OdeSystem& system,
                              const Eigen::VectorXd& x0, const SolverConfig& config);

/// Same update with J frozen at (t_start, x0) for the whole segment.
SegmentResult iterate_segment_frozen(const OperatorSet& ops, const OdeSystem& system,
                                     const Eigen::VectorXd& x0, const SolverConfig& config);

/// Dispatches on config.jacobian_mode.
SegmentResult solve_segment(const OperatorSet& ops, const OdeSystem& system,
                            const Eigen::VectorXd& x0, const SolverConfig& config);

/// A segment failed while marching. `kind()` is the kind of the underlying
/// error; `partial()` holds every segment completed before the failure.
class MarchError : public Error {
public:
    MarchError(ErrorKind cause, const std::string& what, std::size_t segment, double t_start,
               std::shared_ptr<const Trajectory> partial)
        : Error(cause, what), segment_(segment), t_start_(t_start), partial_(std::move(partial)) {}

    std::size_t segment() const noexcept { return segment_; }
    double t_start() const noexcept { return t_start_; }
    const Trajectory& partial() const noexcept { return *partial_; }

private:
    std::size_t segment_;
    double t_start_;
    std::shared_ptr<const Trajectory> partial_;
};

/// Segment-by-segment time marcher. Operators are cached per (N, segment length).
class Marcher {
public:
    Marcher(const OdeSystem& system, double t0, const Eigen::VectorXd& x0, SolverConfig config);

    /// Advance one segment of length min(dt, t_limit - time()). Throws MarchError.
    const SegmentResult& advance(double t_limit);

    double time() const noexcept { return t_; }
    const Eigen::VectorXd& state() const noexcept { return x_; }
    std::size_t segments() const noexcept { return segment_index_; }
    const CollocationGrid& last_grid() const { return *last_grid_; }
    const SegmentResult& last_segment() const { return last_; }

    const Trajectory& trajectory() const noexcept { return traj_; }
    Trajectory take_trajectory() { return std::move(traj_); }

private:
    const OperatorSet& operators_for(double t_len);

    const OdeSystem& system_;
    SolverConfig config_;
    double t0_;
    double t_;
    Eigen::VectorXd x_;
    std::size_t segment_index_ = 0;
    std::map<std::pair<int, double>, OperatorSet> cache_;
    std::optional<CollocationGrid> last_grid_;
    SegmentResult last_;
    Trajectory traj_;
};

/// Solve on [t0, tf] with segments of length config.dt (the last one truncated).
Trajectory march(const OdeSystem& system, double t0, double tf, const Eigen::VectorXd& x0,
                 const SolverConfig& config);

}  // namespace lvim
