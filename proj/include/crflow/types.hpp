#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace crflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cplx kI{0.0, 1.0};

// Invalid run/grid configuration (bad dimensions, bad parameters, bad JSON).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or non-finite field data.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse: mismatched grids, nonpositive times, nonuniform snapshot windows.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal cross-checks failed (e.g. imaginary residue of a provably real
// quantity above tolerance).
struct NumericalConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mathematical hypothesis required by the computation does not hold
// (e.g. the Webster curvature is not positive where positivity is assumed).
struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace crflow
