#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stabrad/matrix.hpp"

namespace stabrad {

enum class StructureKind {
    FullComplex,
    FullReal,
    SparsityComplex,
    SparsityReal,
    ToeplitzBandReal,
    Basis,
};

using IndexPair = std::pair<int, int>;

/// A real-linear subspace S of C^{n x n} together with its orthogonal
/// projection under the real Frobenius pairing Re<X,Y> = Re trace(X* Y).
///
/// Immutable after construction; project() is pure and safe to call from
/// many threads.
class StructureSpace {
public:
    static StructureSpace full_complex(int n);
    static StructureSpace full_real(int n);
    /// pattern: 0-based (row, col) pairs; duplicates and out-of-range
    /// indices are rejected.
    static StructureSpace sparsity_complex(int n, std::vector<IndexPair> pattern);
    static StructureSpace sparsity_real(int n, std::vector<IndexPair> pattern);
    /// Real Toeplitz matrices supported on diagonals -lower..upper.
    static StructureSpace toeplitz_band_real(int n, int lower, int upper);
    /// Generic real span of the given matrices; the basis is orthonormalized
    /// under the real pairing and projection goes through it. Extension
    /// point and test oracle, not exposed on the CLI.
    static StructureSpace from_basis(int n, std::vector<ComplexMatrix> basis);

    /// Orthogonal projection Pi^S(Z).
    ComplexMatrix project(const ComplexMatrix& z) const;

    /// ||Z - Pi^S(Z)||_F; zero iff Z lies in S (up to roundoff).
    double membership_residual(const ComplexMatrix& z) const;

    StructureKind kind() const { return kind_; }
    int dim() const { return n_; }
    /// Dimension of S as a real vector space.
    int real_dimension() const;
    const std::vector<IndexPair>& pattern() const { return pattern_; }
    std::pair<int, int> band() const { return {lower_, upper_}; }
    const std::vector<ComplexMatrix>& basis() const { return basis_; }

    std::string description() const;

private:
    StructureSpace(StructureKind kind, int n) : kind_(kind), n_(n) {}
    void require_shape(const ComplexMatrix& z) const;

    StructureKind kind_;
    int n_;
    std::vector<IndexPair> pattern_; // sorted, for sparsity kinds
    int lower_ = 0, upper_ = 0;      // for the Toeplitz band
    std::vector<ComplexMatrix> basis_; // orthonormal, for Basis kind
};

} // namespace stabrad
