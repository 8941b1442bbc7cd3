#pragma once

#include <stdexcept>
#include <string>

namespace cohest {

/// Bad user input: malformed files, out-of-range parameters.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside the pipeline (eigensolver, non-PSD Laplacian).
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Raised by a scan when the target dimension is empty at every scale.
class NoStructureError : public std::runtime_error
{
public:
    explicit NoStructureError(int q)
        : std::runtime_error("no q-structure at any scale (q = " + std::to_string(q) + ")")
        , q_(q)
    {
    }

    int q() const noexcept { return q_; }

private:
    int q_;
};

} // namespace cohest
