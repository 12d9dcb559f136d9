#pragma once

#include <stdexcept>
#include <string>

namespace stabrad {

/// Base class for all solver errors. Each concrete error maps to a
/// distinct CLI exit code (see tools/stabrad.cpp).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public SolverError {
public:
    using SolverError::SolverError;
};

class NonFiniteInput : public SolverError {
public:
    using SolverError::SolverError;
};

class NonConvergence : public SolverError {
public:
    using SolverError::SolverError;
};

/// Rightmost eigenvalue is (numerically) defective: |x*y| below threshold.
class DegenerateEigenvalue : public SolverError {
public:
    using SolverError::SolverError;
};

/// ||Pi^S(u v*)||_F vanishes while delta > 0, so the structured part of the
/// perturbation is undefined.
class ZeroStructuredPart : public SolverError {
public:
    using SolverError::SolverError;
};

/// ||Pi^S(x y*)||_F vanishes, so the Newton derivative is undefined and the
/// outer iteration must bisect.
class ZeroStructuredGradient : public SolverError {
public:
    using SolverError::SolverError;
};

class NotHurwitz : public SolverError {
public:
    using SolverError::SolverError;
};

class BudgetExhausted : public SolverError {
public:
    using SolverError::SolverError;
};

class ParseError : public SolverError {
public:
    ParseError(const std::string& msg, long line)
        : SolverError(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

class UnsupportedField : public SolverError {
public:
    using SolverError::SolverError;
};

class ContourEscapesWindow : public SolverError {
public:
    using SolverError::SolverError;
};

class OpenContour : public SolverError {
public:
    using SolverError::SolverError;
};

class StepSizeUnstable : public SolverError {
public:
    using SolverError::SolverError;
};

} // namespace stabrad
