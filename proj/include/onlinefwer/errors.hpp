#pragma once

#include <stdexcept>

namespace ofwer {

// A procedure, series or model parameter outside its admissible range.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A malformed observation (p-value outside [0,1], unparsable record, ...).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Hypotheses are indexed from 1.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A runtime invariant (budget, level ordering) was found violated.
struct AuditFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solver could not find a point satisfying its constraint.
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ofwer
