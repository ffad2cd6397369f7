#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyst {

// Absolute tolerance used for value equality and set membership throughout
// the library. Node coordinates and node values are compared against it;
// it is not a relative tolerance.
inline constexpr double kTolEq = 1e-12;

inline bool approx_eq(double x, double y, double tol = kTolEq) {
    return std::abs(x - y) <= tol;
}

// Thrown when a Decomposition is applied at a base point outside the
// delta-ball it was validated for.
class stale_decomposition : public std::runtime_error {
public:
    explicit stale_decomposition(const std::string& what)
        : std::runtime_error(what) {}
};

// Thrown when the validate-and-shrink loop of local_partition exhausts its
// retry budget.
class decomposition_error : public std::runtime_error {
public:
    explicit decomposition_error(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace hyst
