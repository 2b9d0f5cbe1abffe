#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace lvim {

using RhsFn = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;
using JacobianFn = std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& x)>;

/// First-order system dx/dt = g(t, x) with its Jacobian dg/dx.
///
/// Every call to `rhs` is counted. When no analytic Jacobian is supplied,
/// `jacobian` falls back to central differences with step 1e-6 (1 + |x_i|);
/// those rhs calls are counted too.
class OdeSystem {
public:
    OdeSystem() = default;
    OdeSystem(int dim, RhsFn rhs, JacobianFn jacobian = {});

    int dim() const noexcept { return dim_; }
    bool has_analytic_jacobian() const noexcept { return static_cast<bool>(jac_); }

    /// Throws DomainViolation when g is non-finite (or the model itself throws one).
    Eigen::VectorXd rhs(double t, const Eigen::VectorXd& x) const;
    Eigen::MatrixXd jacobian(double t, const Eigen::VectorXd& x) const;

    /// Central-difference Jacobian, regardless of whether an analytic one exists.
    Eigen::MatrixXd finite_difference_jacobian(double t, const Eigen::VectorXd& x) const;

    std::uint64_t evaluations() const noexcept { return evals_; }
    void reset_evaluations() const noexcept { evals_ = 0; }

private:
    int dim_ = 0;
    RhsFn rhs_;
    JacobianFn jac_;
    mutable std::uint64_t evals_ = 0;
};

}  // namespace lvim
