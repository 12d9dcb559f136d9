#pragma once

#include <limits>
#include <string>
#include <vector>

#include "stabrad/inner.hpp"

namespace stabrad {

enum class OuterMode {
    SolveDelta, // fixed eps, root of phi_eps(delta)
    SolveEps,   // fixed delta, root of psi_delta(eps)
};

enum class OuterStatus { Converged, MaxIterations };

struct OuterConfig {
    OuterMode mode = OuterMode::SolveDelta;
    double eps = 0.0;   // fixed parameter in SolveDelta mode
    double delta = 0.0; // fixed parameter in SolveEps mode
    /// Initial value of the free parameter; NaN selects the default
    /// (0 for delta, 1e-2 for eps).
    double param0 = std::numeric_limits<double>::quiet_NaN();
    /// Initial outer tolerance; 0 selects |Re l1 - Re l0| / 10.
    double tol0 = 0.0;
    double tol_floor = 1e-8;
    int k_max = 30;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    InnerOptions inner;
    bool full_flow = false; // integrate the full two-matrix flow instead
};

struct OuterRow {
    int k;            // 1-based outer iteration index
    double param;     // delta_k or eps_k
    double re_lambda; // Re of the rightmost eigenvalue at the inner optimum
    int inner_steps;  // eigentriple evaluations spent by the inner solve
};

struct OuterTrace {
    OuterMode mode = OuterMode::SolveDelta;
    double eps = 0.0;   // fixed or solved eps
    double delta = 0.0; // fixed or solved delta
    std::vector<OuterRow> rows;
    double final_value = 0.0;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    OuterStatus status = OuterStatus::MaxIterations;
    RankOneState extremal; // converged state at the final parameter
    std::vector<std::string> warnings;
};

/// phi_eps'(delta) = -kappa * ||Pi^S(x y*)||_F < 0. Throws
/// ZeroStructuredGradient when the projected eigenvector product vanishes
/// (the caller must bisect).
double phi_derivative(const EigenTriple& triple, const StructureSpace& s);

/// psi_delta'(eps) = -kappa < 0.
double psi_derivative(const EigenTriple& triple);

/// Hybrid Newton / bisection outer iteration. SolveDelta computes the
/// structured eps-stability radius; SolveEps the matching eps for a fixed
/// structured perturbation size. A is validated to be Hurwitz.
OuterTrace solve_radius(const ComplexMatrix& a, const StructureSpace& s,
                        const OuterConfig& config);

struct StabilityRadiusOptions {
    double tol_floor = 1e-10;
    int k_max = 40;
    InnerOptions inner;
};

/// Unstructured stability radius (distance to instability): the zero of
/// eps -> alpha_eps(A), computed with the dual outer iteration at delta = 0.
double stability_radius(const ComplexMatrix& a, const StabilityRadiusOptions& opts = {});

/// Same computation, returning the full trace.
OuterTrace stability_radius_trace(const ComplexMatrix& a,
                                  const StabilityRadiusOptions& opts = {});

} // namespace stabrad
