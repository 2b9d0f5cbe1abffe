#pragma once

#include <filesystem>
#include <istream>

#include <Eigen/Dense>

namespace lvim {

/// Fully normalized spherical-harmonic gravity field in a body-fixed frame.
struct GravityModel {
    double mu = 0.0;     // m^3/s^2
    double r_ref = 0.0;  // m
    int degree = 0;
    Eigen::MatrixXd cbar;  // (degree+1) x (degree+1), lower triangle used, cbar(n, m)
    Eigen::MatrixXd sbar;

    /// Point-mass field: only C00 = 1.
    static GravityModel point_mass(double mu, double r_ref);

    /// Copy restricted to degrees <= `max_degree`.
    GravityModel truncated(int max_degree) const;
};

/// Text format: a header line `mu <value> r_ref <value> degree <n>` followed by
/// `n m Cbar Sbar` lines. `#` starts a comment. Missing coefficients are zero
/// except C00, which defaults to 1.
GravityModel parse_gravity_model(std::istream& in);
GravityModel load_gravity_model(const std::filesystem::path& path);

/// Acceleration = gradient of the geopotential, via the Cunningham V/W
/// recursion on unnormalized coefficients. Throws DomainViolation (t = NaN)
/// below 0.9 r_ref.
Eigen::Vector3d gravity_accel(const GravityModel& model, const Eigen::Vector3d& q);

/// Geopotential V = mu/r sum (R/r)^n Pbar_nm(sin phi)(C cos m lambda + S sin m lambda),
/// from normalized Legendre functions; a separate route from gravity_accel.
double geopotential(const GravityModel& model, const Eigen::Vector3d& q);

/// Potential energy per unit mass, U = -V, so that a = -dU/dq.
inline double potential_energy(const GravityModel& model, const Eigen::Vector3d& q) {
    return -geopotential(model, q);
}

/// Point-mass gravity gradient mu (3 qhat qhat^T - I) / |q|^3.
Eigen::Matrix3d two_body_gravity_gradient(double mu, const Eigen::Vector3d& q);

}  // namespace lvim
