#pragma once

#include <stdexcept>
#include <string>

namespace mortkit {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (bad CSV row, negative time, size mismatch).
struct InvalidInput : Error {
    using Error::Error;
};

// Value outside the mathematical domain of an operation (e.g. non-positive
// sample passed to a log-scale fit).
struct DomainError : Error {
    using Error::Error;
};

// Data that is formally valid but carries no usable signal (zero variance,
// constant series).
struct DegenerateData : Error {
    using Error::Error;
};

// Too few observations for the requested statistic.
struct InsufficientData : Error {
    using Error::Error;
};

// A publisher row (or whole table) with no articles at all.
struct NoArticles : Error {
    using Error::Error;
};

// Survival input with no observed deaths.
struct NoEvents : Error {
    using Error::Error;
};

// A covariate column with zero variance among subjects at risk.
struct DegenerateCovariate : Error {
    using Error::Error;
};

// Optimizer left the trust region (monotone likelihood / separation) or the
// objective became non-finite.
struct Divergence : Error {
    using Error::Error;
};

// Every replicate of a Monte-Carlo experiment failed.
struct ExperimentFailed : Error {
    using Error::Error;
};

} // namespace mortkit
