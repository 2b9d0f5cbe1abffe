#include "lvim/lvim.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lvim {

const char* to_string(JacobianMode mode) {
    return mode == JacobianMode::frozen ? "frozen" : "full";
}

JacobianMode parse_jacobian_mode(const std::string& text) {
    if (text == "full") return JacobianMode::full;
    if (text == "frozen") return JacobianMode::frozen;
    throw InvalidArgument("unknown Jacobian mode '" + text + "' (expected full|frozen)");
}

void SolverConfig::validate() const {
    if (n_basis < 2) throw InvalidArgument("SolverConfig: n_basis must be >= 2");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("SolverConfig: dt must be > 0");
    if (!(tol > 0.0)) throw InvalidArgument("SolverConfig: tol must be > 0");
    if (max_iter < 1) throw InvalidArgument("SolverConfig: max_iter must be >= 1");
}

Eigen::MatrixXd residual(const OperatorSet& ops, const OdeSystem& system,
                         const Eigen::MatrixXd& node_states) {
    const int m = ops.size();
    if (node_states.rows() != m || node_states.cols() != system.dim()) {
        throw InvalidArgument("residual: node_states must be M x D");
    }
    Eigen::MatrixXd r = ops.q * node_states;
    const Eigen::VectorXd& t = ops.grid.physical_nodes();
    for (int j = 0; j < m; ++j) {
        r.row(j) -= system.rhs(t[j], node_states.row(j).transpose()).transpose();
    }
    return r;
}

namespace {

constexpr double kRoundingFloor = 256.0;

template <typename JacobianAt>
SegmentResult iterate(const OperatorSet& ops, const OdeSystem& system, const Eigen::VectorXd& x0,
                      const SolverConfig& config, JacobianAt&& jacobian_at) {
    config.validate();
    if (x0.size() != system.dim()) throw InvalidArgument("iterate_segment: x0 has wrong dimension");
    if (!x0.allFinite()) throw InvalidArgument("iterate_segment: x0 is not finite");

    const int m = ops.size();
    SegmentResult out;
    out.node_states = x0.transpose().replicate(m, 1);

    Eigen::MatrixXd res = residual(ops, system, out.node_states);
    Eigen::MatrixXd correction(m, system.dim());
    const Eigen::VectorXd& t = ops.grid.physical_nodes();

    for (int it = 1; it <= config.max_iter; ++it) {
        const Eigen::MatrixXd h_res = ops.h * res;
        const Eigen::MatrixXd p_res = ops.p * res;
        // Row 0 of P and H vanishes, so the initial state is never corrected.
        correction.row(0).setZero();
        for (int j = 1; j < m; ++j) {
            const Eigen::MatrixXd jac = jacobian_at(t[j], out.node_states.row(j).transpose());
            correction.row(j) = (jac * h_res.row(j).transpose()).transpose() - p_res.row(j);
        }
        out.node_states.bottomRows(m - 1) += correction.bottomRows(m - 1);

        const double norm = correction.cwiseAbs().maxCoeff();
        out.corrections.push_back(norm);
        out.iterations = it;
        out.final_correction = norm;
        if (!std::isfinite(norm)) {
            throw NoConvergence("LVIM iteration diverged (non-finite correction); reduce dt");
        }

        res = residual(ops, system, out.node_states);
        if (norm < config.tol) {
            out.converged = true;
            break;
        }
        // A correction that has stopped shrinking at a few ulps of the state
        // cannot get any smaller; tol is below what the arithmetic resolves.
        const auto& c = out.corrections;
        if (c.size() >= 4) {
            const double prior = std::min({c[c.size() - 2], c[c.size() - 3], c[c.size() - 4]});
            const double floor = kRoundingFloor * std::numeric_limits<double>::epsilon() *
                                 out.node_states.cwiseAbs().maxCoeff();
            if (norm >= 0.5 * prior && norm <= floor) {
                out.converged = true;
                out.at_rounding_floor = true;
                break;
            }
        }
    }
    out.final_residual = res.cwiseAbs().maxCoeff();
    if (!out.converged) {
        std::ostringstream msg;
        msg << "LVIM segment did not converge in " << config.max_iter
            << " iterations (last correction " << out.final_correction << ", tol " << config.tol
            << "); try reducing dt";
        throw NoConvergence(msg.str());
    }
    return out;
}

}  // namespace

SegmentResult iterate_segment(const OperatorSet& ops, const OdeSystem& system,
                              const Eigen::VectorXd& x0, const SolverConfig& config) {
    return iterate(ops, system, x0, config,
                   [&](double t, const Eigen::VectorXd& x) { return system.jacobian(t, x); });
}

SegmentResult iterate_segment_frozen(const OperatorSet& ops, const OdeSystem& system,
                                     const Eigen::VectorXd& x0, const SolverConfig& config) {
    const Eigen::MatrixXd frozen = system.jacobian(ops.grid.t_start(), x0);
    return iterate(ops, system, x0, config,
                   [&](double, const Eigen::VectorXd&) -> const Eigen::MatrixXd& { return frozen; });
}

SegmentResult solve_segment(const OperatorSet& ops, const OdeSystem& system,
                            const Eigen::VectorXd& x0, const SolverConfig& config) {
    return config.jacobian_mode == JacobianMode::frozen
               ? iterate_segment_frozen(ops, system, x0, config)
               : iterate_segment(ops, system, x0, config);
}

Marcher::Marcher(const OdeSystem& system, double t0, const Eigen::VectorXd& x0, SolverConfig config)
    : system_(system), config_(config), t0_(t0), t_(t0), x_(x0) {
    config_.validate();
    if (x0.size() != system.dim()) throw InvalidArgument("march: x0 has wrong dimension");
    if (!x0.allFinite()) throw InvalidArgument("march: x0 is not finite");
    traj_.times.push_back(t0);
    traj_.states.push_back(x0);
}

const OperatorSet& Marcher::operators_for(double t_len) {
    const auto key = std::make_pair(config_.n_basis, t_len);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(key, build_operators(CollocationGrid(config_.n_basis, 0.0, t_len))).first;
    }
    return it->second;
}

const SegmentResult& Marcher::advance(double t_limit) {
    const double remaining = t_limit - t_;
    if (!(remaining > 0.0)) {
        throw InvalidArgument("Marcher::advance: already at or past t_limit");
    }
    const bool last = remaining <= config_.dt * (1.0 + 1e-12);
    const double len = last && std::abs(remaining - config_.dt) > 1e-12 * config_.dt ? remaining
                                                                                     : config_.dt;
    const OperatorSet ops = operators_for(len).rebased(t_);

    const auto start_clock = std::chrono::steady_clock::now();
    const std::uint64_t evals_before = system_.evaluations();
    try {
        last_ = solve_segment(ops, system_, x_, config_);
    } catch (const Error& e) {
        traj_.total_rhs_evals += system_.evaluations() - evals_before;
        std::ostringstream msg;
        msg << "segment " << segment_index_ << " starting at t = " << t_ << ": " << e.what();
        throw MarchError(e.kind(), msg.str(), segment_index_, t_,
                         std::make_shared<const Trajectory>(traj_));
    }
    traj_.total_rhs_evals += system_.evaluations() - evals_before;

    const int m = ops.size();
    const double t_end = last ? t_limit : ops.grid.t_end();
    for (int j = 1; j < m; ++j) {
        traj_.times.push_back(j == m - 1 ? t_end : ops.grid.physical_nodes()[j]);
        traj_.states.push_back(last_.node_states.row(j).transpose());
    }
    traj_.segment_iterations.push_back(last_.iterations);
    if (last_.at_rounding_floor) ++traj_.rounding_floor_segments;
    traj_.dense.push_back({DenseSegment::Kind::chebyshev, ops.grid.t_start(), t_end,
                           chebyshev_coefficients(ops.grid, last_.node_states)});
    traj_.wall_time +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();

    last_grid_ = ops.grid;
    t_ = t_end;
    x_ = last_.node_states.row(m - 1).transpose();
    ++segment_index_;
    return last_;
}

Trajectory march(const OdeSystem& system, double t0, double tf, const Eigen::VectorXd& x0,
                 const SolverConfig& config) {
    if (!(tf > t0)) throw InvalidArgument("march: tf must exceed t0");
    Marcher marcher(system, t0, x0, config);
    while (marcher.time() < tf) {
        marcher.advance(tf);
    }
    return marcher.take_trajectory();
}

}  // namespace lvim
