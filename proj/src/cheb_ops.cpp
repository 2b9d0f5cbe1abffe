#include "lvim/cheb_ops.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lvim/errors.hpp"

namespace lvim {

Eigen::VectorXd cgl_nodes(int m) {
    if (m < 2) {
        throw InvalidArgument("cgl_nodes: need at least 2 nodes, got " + std::to_string(m));
    }
    Eigen::VectorXd tau(m);
    const double step = std::numbers::pi / static_cast<double>(m - 1);
    for (int j = 0; j < m; ++j) {
        tau[j] = -std::cos(step * j);
    }
    // Pin the endpoints and the centre so they are exact, and symmetrize the rest.
    tau[0] = -1.0;
    tau[m - 1] = 1.0;
    for (int j = 1; j < m / 2; ++j) {
        tau[m - 1 - j] = -tau[j];
    }
    if (m % 2 == 1) {
        tau[m / 2] = 0.0;
    }
    return tau;
}

CollocationGrid::CollocationGrid(int n_basis, double t_start, double t_len)
    : t_start_(t_start), t_len_(t_len) {
    if (n_basis < 2) {
        throw InvalidArgument("CollocationGrid: n_basis must be >= 2");
    }
    if (!(t_len > 0.0) || !std::isfinite(t_len) || !std::isfinite(t_start)) {
        throw InvalidArgument("CollocationGrid: segment length must be positive and finite");
    }
    nodes_ = cgl_nodes(n_basis);
    physical_nodes_.resize(n_basis);
    for (int j = 0; j < n_basis; ++j) {
        physical_nodes_[j] = t_start + t_len * (nodes_[j] + 1.0) / 2.0;
    }
}

BasisMatrices basis_matrices(const CollocationGrid& grid) {
    const int m = grid.size();
    const int n = grid.n_basis();
    const Eigen::VectorXd& tau = grid.nodes();

    BasisMatrices b{Eigen::MatrixXd(m, n), Eigen::MatrixXd(m, n), Eigen::MatrixXd(m, n)};
    // T_0 .. T_n (one extra for the antiderivative of T_{n-1}), and U_0 .. U_{n-1}.
    Eigen::VectorXd t_poly(n + 1);
    Eigen::VectorXd u_poly(n);
    for (int j = 0; j < m; ++j) {
        const double x = tau[j];
        t_poly[0] = 1.0;
        t_poly[1] = x;
        for (int k = 1; k < n; ++k) {
            t_poly[k + 1] = 2.0 * x * t_poly[k] - t_poly[k - 1];
        }
        u_poly[0] = 1.0;
        if (n > 1) u_poly[1] = 2.0 * x;
        for (int k = 1; k + 1 < n; ++k) {
            u_poly[k + 1] = 2.0 * x * u_poly[k] - u_poly[k - 1];
        }

        for (int k = 0; k < n; ++k) {
            b.phi(j, k) = t_poly[k];
            // T'_k = k U_{k-1}; the U recurrence is exact at +-1 where the
            // trigonometric form needs its limit k^2 (+-1)^(k+1).
            b.dphi(j, k) = k == 0 ? 0.0 : k * u_poly[k - 1];
            if (k == 0) {
                b.iphi(j, k) = x + 1.0;
            } else if (k == 1) {
                b.iphi(j, k) = 0.5 * (x * x - 1.0);
            } else {
                const double sign_hi = (k + 1) % 2 == 0 ? 1.0 : -1.0;  // T_{k+1}(-1)
                const double sign_lo = (k - 1) % 2 == 0 ? 1.0 : -1.0;  // T_{k-1}(-1)
                b.iphi(j, k) = 0.5 * ((t_poly[k + 1] - sign_hi) / (k + 1) -
                                      (t_poly[k - 1] - sign_lo) / (k - 1));
            }
        }
    }
    return b;
}

namespace {

// Solve X * phi = rhs for X via an LU factorization of phi^T.
Eigen::MatrixXd right_solve(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu_phi_t,
                            const Eigen::MatrixXd& rhs) {
    return lu_phi_t.solve(rhs.transpose()).transpose();
}

Eigen::PartialPivLU<Eigen::MatrixXd> factor_basis(const Eigen::MatrixXd& phi) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(phi.transpose());
    const double rcond = lu.rcond();
    if (!(rcond > 1e3 * Eigen::NumTraits<double>::epsilon())) {
        throw SingularBasis("basis matrix is numerically singular (rcond = " +
                            std::to_string(rcond) + ")");
    }
    return lu;
}

}  // namespace

OperatorSet build_operators(const CollocationGrid& grid) {
    const BasisMatrices b = basis_matrices(grid);
    const auto lu = factor_basis(b.phi);

    const double half = grid.t_len() / 2.0;
    OperatorSet ops{grid, half * right_solve(lu, b.iphi), right_solve(lu, b.dphi) / half, {}};

    // H_ij = P_ij (t_j - t_i). Offsets from the segment start keep H independent
    // of the absolute time.
    const int m = grid.size();
    Eigen::VectorXd offset(m);
    for (int j = 0; j < m; ++j) {
        offset[j] = half * (grid.nodes()[j] + 1.0);
    }
    ops.h.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            ops.h(i, j) = ops.p(i, j) * offset[j] - offset[i] * ops.p(i, j);
        }
    }
    return ops;
}

Eigen::MatrixXd chebyshev_coefficients(const CollocationGrid& grid,
                                       const Eigen::Ref<const Eigen::MatrixXd>& node_values) {
    if (node_values.rows() != grid.size()) {
        throw InvalidArgument("chebyshev_coefficients: expected one row per node");
    }
    const BasisMatrices b = basis_matrices(grid);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b.phi);
    return lu.solve(node_values);
}

Eigen::VectorXd evaluate_chebyshev(const Eigen::Ref<const Eigen::MatrixXd>& coeffs, double tau) {
    // Clenshaw recurrence, column-wise.
    const Eigen::Index n = coeffs.rows();
    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(coeffs.cols());
    Eigen::VectorXd b2 = Eigen::VectorXd::Zero(coeffs.cols());
    for (Eigen::Index k = n - 1; k >= 1; --k) {
        Eigen::VectorXd b0 = coeffs.row(k).transpose() + 2.0 * tau * b1 - b2;
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    return coeffs.row(0).transpose() + tau * b1 - b2;
}

double interpolate(const CollocationGrid& grid,
                   const Eigen::Ref<const Eigen::VectorXd>& node_values,
                   double t_query) {
    if (node_values.size() != grid.size()) {
        throw InvalidArgument("interpolate: expected one value per node");
    }
    if (!(t_query >= grid.t_start() && t_query <= grid.t_end())) {
        throw OutOfRange("interpolate: t = " + std::to_string(t_query) + " outside segment [" +
                         std::to_string(grid.t_start()) + ", " + std::to_string(grid.t_end()) +
                         "]");
    }
    for (int j = 0; j < grid.size(); ++j) {
        if (grid.physical_nodes()[j] == t_query) return node_values[j];
    }
    const Eigen::MatrixXd coeffs = chebyshev_coefficients(grid, node_values);
    return evaluate_chebyshev(coeffs, grid.to_reference(t_query))[0];
}

}  // namespace lvim
