#include "lvim/ode_system.hpp"

#include <cmath>
#include <string>

#include "lvim/errors.hpp"

namespace lvim {

OdeSystem::OdeSystem(int dim, RhsFn rhs, JacobianFn jacobian)
    : dim_(dim), rhs_(std::move(rhs)), jac_(std::move(jacobian)) {
    if (dim < 1) throw InvalidArgument("OdeSystem: dimension must be >= 1");
    if (!rhs_) throw InvalidArgument("OdeSystem: missing right-hand side");
}

Eigen::VectorXd OdeSystem::rhs(double t, const Eigen::VectorXd& x) const {
    if (x.size() != dim_) {
        throw InvalidArgument("OdeSystem: state has " + std::to_string(x.size()) +
                              " components, expected " + std::to_string(dim_));
    }
    ++evals_;
    Eigen::VectorXd g = rhs_(t, x);
    if (g.size() != dim_) {
        throw InvalidArgument("OdeSystem: rhs returned " + std::to_string(g.size()) +
                              " components, expected " + std::to_string(dim_));
    }
    if (!g.allFinite()) {
        throw DomainViolation("rhs is not finite at t = " + std::to_string(t), t, x);
    }
    return g;
}

Eigen::MatrixXd OdeSystem::jacobian(double t, const Eigen::VectorXd& x) const {
    if (!jac_) return finite_difference_jacobian(t, x);
    Eigen::MatrixXd j = jac_(t, x);
    if (j.rows() != dim_ || j.cols() != dim_) {
        throw InvalidArgument("OdeSystem: Jacobian has wrong shape");
    }
    if (!j.allFinite()) {
        throw DomainViolation("Jacobian is not finite at t = " + std::to_string(t), t, x);
    }
    return j;
}

Eigen::MatrixXd OdeSystem::finite_difference_jacobian(double t, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd j(dim_, dim_);
    Eigen::VectorXd probe = x;
    for (int i = 0; i < dim_; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        probe[i] = x[i] + h;
        const Eigen::VectorXd plus = rhs(t, probe);
        probe[i] = x[i] - h;
        const Eigen::VectorXd minus = rhs(t, probe);
        probe[i] = x[i];
        j.col(i) = (plus - minus) / (2.0 * h);
    }
    return j;
}

}  // namespace lvim
