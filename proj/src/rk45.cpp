#include "lvim/rk45.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "lvim/errors.hpp"

namespace lvim {

namespace {

// Dormand & Prince (1980), with the dense-output weights of Hairer, Norsett & Wanner.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// 5th-order solution minus the embedded 4th-order one.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

double scaled_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& x, const Eigen::VectorXd& x_new,
                   const RkConfig& cfg) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
        worst = std::max(worst, std::abs(v[i]) / sc);
    }
    return worst;
}

double initial_step(const OdeSystem& system, double t0, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& f0, double span, const RkConfig& cfg) {
    const double d0 = scaled_norm(x0, x0, x0, cfg);
    const double d1n = scaled_norm(f0, x0, x0, cfg);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min({h0, span, cfg.h_max});
    const Eigen::VectorXd x1 = x0 + h0 * f0;
    const Eigen::VectorXd f1 = system.rhs(t0 + h0, x1);
    const double d2 = scaled_norm(f1 - f0, x0, x0, cfg) / h0;
    const double big = std::max(d1n, d2);
    const double h1 = big <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / big, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span, cfg.h_max});
}

}  // namespace

void RkConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidArgument("RkConfig: tolerances must be > 0");
    if (max_steps < 1) throw InvalidArgument("RkConfig: max_steps must be >= 1");
    if (!(h_max > 0.0)) throw InvalidArgument("RkConfig: h_max must be > 0");
}

Trajectory rk45_integrate(const OdeSystem& system, double t0, double tf, const Eigen::VectorXd& x0,
                          const RkConfig& cfg) {
    cfg.validate();
    if (!(tf > t0)) throw InvalidArgument("rk45_integrate: tf must exceed t0");
    if (x0.size() != system.dim()) throw InvalidArgument("rk45_integrate: x0 has wrong dimension");
    if (!x0.allFinite()) throw InvalidArgument("rk45_integrate: x0 is not finite");

    const auto start_clock = std::chrono::steady_clock::now();
    const std::uint64_t evals_before = system.evaluations();

    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(x0);

    double t = t0;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd k1 = system.rhs(t, x);
    double h = cfg.h_init > 0.0 ? std::min(cfg.h_init, tf - t0) : initial_step(system, t0, x0, k1, tf - t0, cfg);

    const double min_step = 16.0 * std::numeric_limits<double>::epsilon();
    while (t < tf) {
        if (traj.accepted_steps + traj.rejected_steps >= cfg.max_steps) {
            std::ostringstream msg;
            msg << "rk45: exceeded max_steps = " << cfg.max_steps << " at t = " << t;
            throw NoConvergence(msg.str());
        }
        h = std::min(h, cfg.h_max);
        bool hits_end = false;
        if (t + h >= tf || tf - (t + h) < min_step * std::abs(tf)) {
            h = tf - t;
            hits_end = true;
        }
        if (h <= min_step * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "rk45: step size underflow at t = " << t;
            throw NoConvergence(msg.str());
        }

        const Eigen::VectorXd k2 = system.rhs(t + c2 * h, x + h * (a21 * k1));
        const Eigen::VectorXd k3 = system.rhs(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = system.rhs(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 =
            system.rhs(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 =
            system.rhs(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd x_new =
            x + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const Eigen::VectorXd k7 = system.rhs(t + h, x_new);
        if (!x_new.allFinite()) {
            throw DomainViolation("rk45: non-finite state", t + h, x_new);
        }

        const Eigen::VectorXd err_vec =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = scaled_norm(err_vec, x, x_new, cfg);
        const double factor =
            err == 0.0 ? kMaxFactor
                       : std::clamp(kSafety * std::pow(err, -1.0 / 5.0), kMinFactor, kMaxFactor);

        if (err <= 1.0) {
            const double t_new = hits_end ? tf : t + h;
            DenseSegment seg{DenseSegment::Kind::dopri, t, t_new, Eigen::MatrixXd(x.size(), 5)};
            const Eigen::VectorXd ydiff = x_new - x;
            const Eigen::VectorXd bspl = h * k1 - ydiff;
            seg.coeffs.col(0) = x;
            seg.coeffs.col(1) = ydiff;
            seg.coeffs.col(2) = bspl;
            seg.coeffs.col(3) = ydiff - h * k7 - bspl;
            seg.coeffs.col(4) = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            traj.dense.push_back(std::move(seg));

            t = t_new;
            x = x_new;
            k1 = k7;
            traj.times.push_back(t);
            traj.states.push_back(x);
            ++traj.accepted_steps;
        } else {
            ++traj.rejected_steps;
        }
        h *= factor;
    }

    traj.total_rhs_evals = system.evaluations() - evals_before;
    traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();
    return traj;
}

}  // namespace lvim
