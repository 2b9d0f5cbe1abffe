#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "lvim/problems.hpp"
#include "report.hpp"

namespace lvim::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_no_convergence = 2,
    exit_assertion = 3,
    exit_self_test = 4,
};

const std::vector<std::string>& problem_names();

/// Flag overrides shared by run and compare. Unset fields keep the problem defaults.
struct RunOptions {
    std::optional<int> n;
    std::optional<double> dt;
    std::optional<double> tol;
    std::optional<std::string> jacobian;
    std::optional<double> t_end;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<std::string> gravity_file;
    std::optional<int> degree;
    std::optional<std::string> load_type;
    std::map<std::string, double> parameters;  // problem specific, e.g. "epsilon"
};

/// Solve `problem` with LVIM; with `compare` also run the RK oracle on the same span.
RunReport run_problem(const std::string& problem, const RunOptions& options, bool compare);

struct OpsCheckRow {
    int n;
    double dt;
    double tolerance;
    double q_error;      // reference-interval error on T_0..T_{n-1}, normalized
    double p_error;
    bool first_rows_zero;
    double shift_error;  // operators at t_start = 0 vs far from the origin
    bool pass;
};

double exactness_tolerance(int n, double dt);
OpsCheckRow ops_check(int n, double dt);

/// LVIM_THREADS: unset or 0 means serial.
std::size_t sweep_threads();

/// fn(0..count-1) on up to `threads` workers; results are in index order.
/// The first failure by index is rethrown after all jobs finish.
template <typename F>
auto parallel_map(std::size_t count, std::size_t threads, F&& fn) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < std::min(threads, count); ++k) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

struct SweepOptions {
    std::vector<double> amplitudes;
    std::vector<double> a_values;
    std::vector<double> c_values;
    std::vector<double> loads;
    std::string load_type = "dead";
    std::optional<double> guess_a;
    std::optional<double> guess_b;
    RunOptions solver;  // n, dt, tol, jacobian overrides
};

CsvTable sweep_pendulum_frequency(const SweepOptions& options, std::size_t threads);

/// One table (regime, a, c, x, y) per (a, c) pair.
std::vector<CsvTable> sweep_elastica_regimes(const SweepOptions& options, std::size_t threads);

/// Deflection curves (load_type, P, solution, theta_prime_0, alpha, s, theta, theta_prime).
CsvTable sweep_bar_load(const SweepOptions& options, std::size_t threads);

/// The whole command line, minus argv[0]. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lvim::cli
