#include "lvim/gravity.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "lvim/errors.hpp"

namespace lvim {

namespace {

constexpr int kMaxDegree = 60;

void check_radius(const GravityModel& model, const Eigen::Vector3d& q) {
    const double r = q.norm();
    if (!(r > 0.9 * model.r_ref)) {
        std::ostringstream msg;
        msg << "gravity: |q| = " << r << " m is below the 0.9 r_ref guard";
        throw DomainViolation(msg.str(), std::numeric_limits<double>::quiet_NaN(), q);
    }
}

// sqrt((2 - delta_m0)(2n + 1)(n - m)! / (n + m)!)
double normalization(int n, int m) {
    double ratio = 1.0;
    for (int k = n - m + 1; k <= n + m; ++k) ratio /= k;
    return std::sqrt((m == 0 ? 1.0 : 2.0) * (2 * n + 1) * ratio);
}

}  // namespace

GravityModel GravityModel::point_mass(double mu, double r_ref) {
    GravityModel g;
    g.mu = mu;
    g.r_ref = r_ref;
    g.degree = 0;
    g.cbar = Eigen::MatrixXd::Ones(1, 1);
    g.sbar = Eigen::MatrixXd::Zero(1, 1);
    return g;
}

GravityModel GravityModel::truncated(int max_degree) const {
    if (max_degree < 0) throw InvalidArgument("gravity: degree must be >= 0");
    if (max_degree > degree) {
        throw InvalidArgument("gravity: requested degree " + std::to_string(max_degree) +
                              " exceeds model degree " + std::to_string(degree));
    }
    GravityModel g = *this;
    g.degree = max_degree;
    g.cbar = cbar.topLeftCorner(max_degree + 1, max_degree + 1);
    g.sbar = sbar.topLeftCorner(max_degree + 1, max_degree + 1);
    return g;
}

GravityModel parse_gravity_model(std::istream& in) {
    GravityModel g;
    bool have_header = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;

        const auto fail = [&](const std::string& why) {
            throw InvalidArgument("gravity file line " + std::to_string(line_no) + ": " + why);
        };
        if (!have_header) {
            std::string k_rref, k_degree;
            if (first != "mu" || !(fields >> g.mu >> k_rref >> g.r_ref >> k_degree >> g.degree) ||
                k_rref != "r_ref" || k_degree != "degree") {
                fail("expected header 'mu <value> r_ref <value> degree <n>'");
            }
            if (!(g.mu > 0.0) || !(g.r_ref > 0.0)) fail("mu and r_ref must be positive");
            if (g.degree < 0 || g.degree > kMaxDegree) {
                fail("degree must be in [0, " + std::to_string(kMaxDegree) + "]");
            }
            g.cbar = Eigen::MatrixXd::Zero(g.degree + 1, g.degree + 1);
            g.sbar = Eigen::MatrixXd::Zero(g.degree + 1, g.degree + 1);
            g.cbar(0, 0) = 1.0;
            have_header = true;
            continue;
        }

        int n = 0;
        int m = 0;
        double c = 0.0;
        double s = 0.0;
        std::istringstream row(line);
        if (!(row >> n >> m >> c >> s)) fail("expected 'n m Cbar Sbar'");
        if (!(0 <= m && m <= n && n <= g.degree)) fail("indices must satisfy 0 <= m <= n <= degree");
        if (n == 0 && (c != 1.0 || s != 0.0)) fail("C00 must equal 1 and S00 must be 0");
        g.cbar(n, m) = c;
        g.sbar(n, m) = s;
    }
    if (!have_header) throw InvalidArgument("gravity file: missing header line");
    return g;
}

GravityModel load_gravity_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open gravity file '" + path.string() + "'");
    return parse_gravity_model(in);
}

Eigen::Vector3d gravity_accel(const GravityModel& model, const Eigen::Vector3d& q) {
    check_radius(model, q);
    const int nmax = model.degree;
    const int size = nmax + 2;
    const double r2 = q.squaredNorm();
    const double rho = model.r_ref * model.r_ref / r2;
    const double x0 = model.r_ref * q.x() / r2;
    const double y0 = model.r_ref * q.y() / r2;
    const double z0 = model.r_ref * q.z() / r2;

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(size + 1, size + 1);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size + 1, size + 1);
    v(0, 0) = model.r_ref / std::sqrt(r2);
    for (int m = 0; m <= size - 1; ++m) {
        if (m > 0) {
            v(m, m) = (2 * m - 1) * (x0 * v(m - 1, m - 1) - y0 * w(m - 1, m - 1));
            w(m, m) = (2 * m - 1) * (x0 * w(m - 1, m - 1) + y0 * v(m - 1, m - 1));
        }
        if (m + 1 <= size - 1) {
            v(m + 1, m) = (2 * m + 1) * z0 * v(m, m);
            w(m + 1, m) = (2 * m + 1) * z0 * w(m, m);
        }
        for (int n = m + 2; n <= size - 1; ++n) {
            v(n, m) = ((2 * n - 1) * z0 * v(n - 1, m) - (n + m - 1) * rho * v(n - 2, m)) / (n - m);
            w(n, m) = ((2 * n - 1) * z0 * w(n - 1, m) - (n + m - 1) * rho * w(n - 2, m)) / (n - m);
        }
    }

    double ax = 0.0;
    double ay = 0.0;
    double az = 0.0;
    for (int n = 0; n <= nmax; ++n) {
        for (int m = 0; m <= n; ++m) {
            const double scale = normalization(n, m);
            const double c = scale * model.cbar(n, m);
            const double s = scale * model.sbar(n, m);
            if (m == 0) {
                ax -= c * v(n + 1, 1);
                ay -= c * w(n + 1, 1);
                az += (n + 1) * (-c * v(n + 1, 0) - s * w(n + 1, 0));
            } else {
                const double fac = 0.5 * (n - m + 1) * (n - m + 2);
                ax += 0.5 * (-c * v(n + 1, m + 1) - s * w(n + 1, m + 1)) +
                      fac * (c * v(n + 1, m - 1) + s * w(n + 1, m - 1));
                ay += 0.5 * (-c * w(n + 1, m + 1) + s * v(n + 1, m + 1)) +
                      fac * (-c * w(n + 1, m - 1) + s * v(n + 1, m - 1));
                az += (n - m + 1) * (-c * v(n + 1, m) - s * w(n + 1, m));
            }
        }
    }
    const double gm_r2 = model.mu / (model.r_ref * model.r_ref);
    return {gm_r2 * ax, gm_r2 * ay, gm_r2 * az};
}

double geopotential(const GravityModel& model, const Eigen::Vector3d& q) {
    check_radius(model, q);
    const int nmax = model.degree;
    const double r = q.norm();
    const double sin_phi = q.z() / r;
    const double cos_phi = std::hypot(q.x(), q.y()) / r;
    const double lambda = std::atan2(q.y(), q.x());

    // Pbar(n, m)(sin phi), fully normalized.
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(nmax + 1, nmax + 1);
    p(0, 0) = 1.0;
    for (int m = 1; m <= nmax; ++m) {
        const double f = m == 1 ? std::sqrt(3.0) : std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        p(m, m) = f * cos_phi * p(m - 1, m - 1);
    }
    for (int m = 0; m <= nmax; ++m) {
        for (int n = m + 1; n <= nmax; ++n) {
            const double a = std::sqrt((2.0 * n - 1.0) * (2.0 * n + 1.0) / ((n - m) * (n + m)));
            const double b = n - 2 >= m ? std::sqrt((2.0 * n + 1.0) * (n + m - 1.0) * (n - m - 1.0) /
                                                    ((n - m) * (n + m) * (2.0 * n - 3.0)))
                                        : 0.0;
            p(n, m) = a * sin_phi * p(n - 1, m) - (n - 2 >= m ? b * p(n - 2, m) : 0.0);
        }
    }

    double sum = 0.0;
    double ratio_pow = 1.0;
    const double ratio = model.r_ref / r;
    for (int n = 0; n <= nmax; ++n) {
        double inner = 0.0;
        for (int m = 0; m <= n; ++m) {
            inner += p(n, m) * (model.cbar(n, m) * std::cos(m * lambda) +
                                model.sbar(n, m) * std::sin(m * lambda));
        }
        sum += ratio_pow * inner;
        ratio_pow *= ratio;
    }
    return model.mu / r * sum;
}

Eigen::Matrix3d two_body_gravity_gradient(double mu, const Eigen::Vector3d& q) {
    const double r = q.norm();
    const Eigen::Vector3d u = q / r;
    return mu / (r * r * r) * (3.0 * u * u.transpose() - Eigen::Matrix3d::Identity());
}

}  // namespace lvim
