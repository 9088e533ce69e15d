// errors.hpp: exception hierarchy shared by every auxeng module

#pragma once

#include <stdexcept>
#include <string>

namespace auxeng {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operator shapes that do not fit together (factor counts, matrix sizes).
struct DimensionError : Error {
    using Error::Error;
};

// Input outside what an operation supports (e.g. non-qubit dimensions).
struct UnsupportedError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    DegeneracyError(int level_a, int level_b, double gap)
        : Error("degenerate levels " + std::to_string(level_a) + " and " + std::to_string(level_b) +
                " (gap " + std::to_string(gap) + ")"),
          level_a_(level_a),
          level_b_(level_b) {}

    int level_a() const noexcept { return level_a_; }
    int level_b() const noexcept { return level_b_; }

private:
    int level_a_;
    int level_b_;
};

struct OrderOverflowError : Error {
    using Error::Error;
};

// Spectral-fit branch tracking lost the level between adjacent grid points.
struct BranchTrackingError : Error {
    using Error::Error;
};

// Non-Hermitian branch identification found two candidates of similar overlap.
struct BranchIdentificationError : Error {
    using Error::Error;
};

struct ConstraintShapeError : Error {
    using Error::Error;
};

struct ResourceError : Error {
    using Error::Error;
};

struct NoiseTooLargeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace auxeng
