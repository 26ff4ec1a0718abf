#pragma once

#include <stdexcept>

namespace g3m {

// Numerical degeneracy: particular-solution poles, singular or ill-conditioned
// boundary solves, zero-fee coefficient systems. Distinct from input validation
// errors (std::invalid_argument / std::domain_error) so callers can map them to
// a dedicated exit status.
struct degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace g3m
