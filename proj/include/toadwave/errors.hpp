#pragma once

#include <stdexcept>
#include <string>

namespace toadwave {

/// Iterative solver failed to reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                             ", residual=" + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// A root or minimum bracket could not be established.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace toadwave
