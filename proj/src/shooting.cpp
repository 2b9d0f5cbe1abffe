#include "lvim/shooting.hpp"

#include <cmath>
#include <sstream>

#include "lvim/errors.hpp"

namespace lvim {

ScalarRoot shoot_scalar(const std::function<double(double)>& residual_fn, double guess_a, double guess_b,
                        double tol, int max_shots, std::optional<SlopeWindow> window) {
    if (guess_a == guess_b) throw InvalidArgument("shoot_scalar: guesses must differ");
    if (!(tol > 0.0)) throw InvalidArgument("shoot_scalar: tol must be > 0");

    int evaluations = 0;
    auto eval = [&](double v) {
        ++evaluations;
        try {
            return residual_fn(v);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "shot with slope " << v << " failed: " << e.what();
            throw Error(e.kind(), msg.str());
        }
    };

    double v0 = guess_a;
    double v1 = guess_b;
    double r0 = eval(v0);
    if (std::abs(r0) < tol) return {v0, r0, evaluations};
    double r1 = eval(v1);

    // Bracket kept for the bisection fallback.
    std::optional<std::pair<double, double>> bracket;
    auto update_bracket = [&](double va, double ra, double vb, double rb) {
        if (ra * rb < 0.0) bracket = va < vb ? std::make_pair(va, vb) : std::make_pair(vb, va);
    };
    update_bracket(v0, r0, v1, r1);

    while (std::abs(r1) >= tol) {
        if (evaluations >= max_shots) {
            std::ostringstream msg;
            msg << "shooting did not converge in " << max_shots << " shots (last residual " << r1 << ")";
            throw NoConvergence(msg.str());
        }
        double v2;
        if (r1 != r0) {
            v2 = v1 - r1 * (v1 - v0) / (r1 - r0);
        } else if (bracket) {
            v2 = 0.5 * (bracket->first + bracket->second);
        } else {
            throw NoConvergence("shooting stalled: equal residuals at two distinct slopes");
        }
        if (window && (!(v2 >= window->lo) || !(v2 <= window->hi))) {
            v2 = bracket ? 0.5 * (bracket->first + bracket->second)
                         : 0.5 * (v1 + (v2 < window->lo ? window->lo : window->hi));
        }
        const double r2 = eval(v2);
        update_bracket(v1, r1, v2, r2);
        v0 = v1;
        r0 = r1;
        v1 = v2;
        r1 = r2;
    }
    return {v1, r1, evaluations};
}

Trajectory integrate_bar(LoadType load_type, double load, double alpha, double slope,
                         const ShootConfig& config) {
    ProblemSpec spec = buckled_bar(load_type, load, alpha);
    spec.x0[1] = slope;
    return config.integrator == ShotIntegrator::lvim
               ? march(spec.system, spec.t0, spec.tf, spec.x0, config.lvim)
               : rk45_integrate(spec.system, spec.t0, spec.tf, spec.x0, config.rk);
}

namespace {

struct InnerShot {
    double slope;
    Trajectory trajectory;
    int shots;
};

InnerShot shoot_slope(LoadType load_type, double load, double alpha, std::pair<double, double> guesses,
                      const ShootConfig& config) {
    Trajectory last;
    double last_slope = std::nan("");
    auto residual = [&](double slope) {
        last = integrate_bar(load_type, load, alpha, slope, config);
        last_slope = slope;
        return last.states.back()[1];
    };
    const ScalarRoot root =
        shoot_scalar(residual, guesses.first, guesses.second, config.tol, config.max_shots, config.window);
    if (last_slope != root.root) residual(root.root);
    return {root.root, std::move(last), root.evaluations};
}

}  // namespace

ShotResult solve_buckled_bar(LoadType load_type, double load, std::pair<double, double> slope_guesses,
                             const ShootConfig& config) {
    if (!(load >= 0.0)) throw InvalidArgument("solve_buckled_bar: load must be >= 0");
    ShotResult out;

    if (load_type == LoadType::dead) {
        InnerShot shot = shoot_slope(load_type, load, 0.0, slope_guesses, config);
        out.theta_prime_0 = shot.slope;
        out.trajectory = std::move(shot.trajectory);
        out.alpha = out.trajectory.states.back()[0];
        out.residual = std::abs(out.trajectory.states.back()[1]);
        out.outer_iters = 1;
        out.inner_iters = shot.shots;
        return out;
    }

    double alpha = 0.0;
    std::pair<double, double> guesses = slope_guesses;
    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        InnerShot shot = shoot_slope(load_type, load, alpha, guesses, config);
        out.inner_iters += shot.shots;
        out.outer_iters = sweep;
        const double tip = shot.trajectory.states.back()[0];
        const double mismatch = tip - alpha;
        if (std::abs(mismatch) < config.tol) {
            out.theta_prime_0 = shot.slope;
            out.alpha = alpha;
            out.residual = std::abs(shot.trajectory.states.back()[1]);
            out.trajectory = std::move(shot.trajectory);
            return out;
        }
        alpha += config.damping * mismatch;
        // Warm start the next inner shoot around the last converged slope.
        const double spread = std::max(1e-3, 1e-3 * std::abs(shot.slope));
        guesses = {shot.slope, shot.slope + spread};
    }
    std::ostringstream msg;
    msg << "follower-load fixed point on alpha did not converge in " << config.max_sweeps << " sweeps";
    throw NoConvergence(msg.str());
}

std::vector<std::pair<double, double>> scan_slope_brackets(LoadType load_type, double load, double alpha,
                                                           double slope_max, int samples,
                                                           const ShootConfig& config) {
    if (!(slope_max > 0.0) || samples < 2) throw InvalidArgument("scan_slope_brackets: need slope_max > 0, samples >= 2");
    std::vector<std::pair<double, double>> out;
    double prev_v = 0.0;
    double prev_r = 0.0;
    for (int i = 1; i <= samples; ++i) {
        const double v = slope_max * i / samples;
        const double r = integrate_bar(load_type, load, alpha, v, config).states.back()[1];
        if (i > 1 && prev_r * r < 0.0) out.emplace_back(prev_v, v);
        prev_v = v;
        prev_r = r;
    }
    return out;
}

std::pair<std::pair<double, double>, std::pair<double, double>> default_bar_guesses() {
    return {{12.5, 13.0}, {14.14, 14.142}};
}

}  // namespace lvim
