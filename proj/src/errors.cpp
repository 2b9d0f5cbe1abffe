#include "lvim/errors.hpp"

namespace lvim {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::out_of_range: return "out-of-range";
        case ErrorKind::domain_violation: return "domain-violation";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::singular_basis: return "numerically-singular-basis";
    }
    return "unknown";
}

}  // namespace lvim
