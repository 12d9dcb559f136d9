#pragma once

#include <optional>
#include <vector>

#include "stabrad/matrix.hpp"

namespace stabrad {

/// Rightmost eigenvalue of a matrix together with its normalized left and
/// right eigenvectors.
///
/// Conventions: ||x|| = ||y|| = 1 and x*y real and positive, so the
/// eigenvalue condition number is kappa = 1/(x*y) >= 1. When a phase anchor
/// u is given, x is additionally rotated so that x*u is real and positive
/// (y is then re-rotated to restore x*y > 0).
struct EigenTriple {
    Complex lambda{};
    ComplexVector x;   // left eigenvector:  x* M = lambda x*
    ComplexVector y;   // right eigenvector: M y = lambda y
    double kappa = 0.0;
    /// Re(lambda) minus the next-largest real part among the remaining
    /// eigenvalues. Diagnostic only; 0 for a complex-conjugate rightmost
    /// pair of a real matrix.
    double gap = 0.0;
    /// Set when gap < 1e-8, i.e. the rightmost real part is (nearly) tied.
    bool tight_gap = false;
};

/// Eigensolver residual tolerance, 1e-10 * ||M||_F.
double eig_tolerance(const ComplexMatrix& m);

/// Eigenvalue of maximal real part (ties broken by maximal imaginary part)
/// with normalized eigenvectors. Throws DegenerateEigenvalue when
/// |x*y| < 1e-14 (defective rightmost eigenvalue) and NonConvergence when
/// the QR iteration fails.
EigenTriple rightmost_eigentriple(const ComplexMatrix& m,
                                  const ComplexVector* phase_anchor = nullptr);

/// Refines a known eigentriple on a nearby matrix: one LU factorization of
/// M - sigma*I (shared by the right and the left inverse iteration) plus
/// Rayleigh-quotient updates of the eigenvalue. Returns nullopt when the
/// residual tolerance is not reached, in which case the caller should fall
/// back to the dense solve. The result tracks the hinted eigenvalue branch
/// and carries the hint's (stale) gap diagnostic; it does not certify that
/// the eigenvalue is still the rightmost one.
std::optional<EigenTriple> refine_eigentriple(const ComplexMatrix& m, const EigenTriple& hint,
                                              const ComplexVector* phase_anchor = nullptr);

/// All n eigenvalues with multiplicity, sorted by (Re desc, Im desc).
std::vector<Complex> all_eigenvalues(const ComplexMatrix& m);

/// sigma_min(M); equals 1/||M^-1||_2 for invertible M, 0 iff M is singular
/// to machine precision.
double smallest_singular_value(const ComplexMatrix& m);

/// sigma_max(M) = ||M||_2.
double spectral_norm(const ComplexMatrix& m);

/// Solves A X = B with partial-pivoted LU. A must be square.
ComplexMatrix solve_linear(ComplexMatrix a, ComplexMatrix b);

ComplexMatrix inverse(const ComplexMatrix& a);

} // namespace stabrad
