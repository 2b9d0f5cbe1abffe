#pragma once

#include <Eigen/Dense>

namespace lvim {

/// Chebyshev-Gauss-Lobatto nodes -cos(pi j / (m-1)), j = 0..m-1, ascending on [-1, 1].
Eigen::VectorXd cgl_nodes(int m);

/// CGL collocation grid for one time segment [t_start, t_start + t_len].
///
/// The node count always equals the basis count so that the node-to-coefficient
/// map is square and invertible.
class CollocationGrid {
public:
    CollocationGrid(int n_basis, double t_start, double t_len);

    int n_basis() const noexcept { return static_cast<int>(nodes_.size()); }
    int size() const noexcept { return n_basis(); }
    double t_start() const noexcept { return t_start_; }
    double t_len() const noexcept { return t_len_; }
    double t_end() const noexcept { return physical_nodes_[physical_nodes_.size() - 1]; }

    const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
    const Eigen::VectorXd& physical_nodes() const noexcept { return physical_nodes_; }

    /// Map a physical time onto [-1, 1].
    double to_reference(double t) const noexcept { return 2.0 * (t - t_start_) / t_len_ - 1.0; }

    /// Same nodes and length, anchored at a new start time.
    CollocationGrid rebased(double t_start) const { return {n_basis(), t_start, t_len_}; }

private:
    double t_start_;
    double t_len_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd physical_nodes_;
};

/// Chebyshev basis evaluated at the reference nodes: values, derivatives and
/// antiderivatives from -1. Column k holds T_k.
struct BasisMatrices {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd dphi;
    Eigen::MatrixXd iphi;
};

BasisMatrices basis_matrices(const CollocationGrid& grid);

/// Node-space operators in physical time for one segment.
///
/// `p` integrates node samples from the segment start, `q` differentiates them,
/// and `h = p T - T p` with T = diag(node times). Row 0 of `p` and `h` is zero.
struct OperatorSet {
    CollocationGrid grid;
    Eigen::MatrixXd p;
    Eigen::MatrixXd q;
    Eigen::MatrixXd h;

    int size() const noexcept { return grid.size(); }

    /// Operators for a segment of the same length starting at `t_start`.
    /// P, Q and H are shift invariant, so only the grid changes.
    OperatorSet rebased(double t_start) const { return {grid.rebased(t_start), p, q, h}; }
};

OperatorSet build_operators(const CollocationGrid& grid);

/// Chebyshev coefficients (N x D) of the interpolant through node samples (M x D).
Eigen::MatrixXd chebyshev_coefficients(const CollocationGrid& grid,
                                       const Eigen::Ref<const Eigen::MatrixXd>& node_values);

/// Sum_k coeffs(k, :) T_k(tau) for tau in [-1, 1]; returns one value per column.
Eigen::VectorXd evaluate_chebyshev(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, double tau);

/// Evaluate the degree N-1 interpolant of `node_values` at physical time `t_query`.
/// Throws OutOfRange outside the segment.
double interpolate(const CollocationGrid& grid,
                   const Eigen::Ref<const Eigen::VectorXd>& node_values,
                   double t_query);

}  // namespace lvim
