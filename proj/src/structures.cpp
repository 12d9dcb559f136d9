#include "stabrad/structures.hpp"

#include <algorithm>
#include <cmath>

#include "stabrad/errors.hpp"

namespace stabrad {
namespace {

std::vector<IndexPair> validate_pattern(int n, std::vector<IndexPair> pattern) {
    std::sort(pattern.begin(), pattern.end());
    for (size_t k = 0; k < pattern.size(); ++k) {
        const auto [i, j] = pattern[k];
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw DimensionMismatch("sparsity pattern index out of range");
        if (k > 0 && pattern[k] == pattern[k - 1])
            throw DimensionMismatch("duplicate index in sparsity pattern");
    }
    return pattern;
}

} // namespace

StructureSpace StructureSpace::full_complex(int n) {
    return StructureSpace(StructureKind::FullComplex, n);
}

StructureSpace StructureSpace::full_real(int n) {
    return StructureSpace(StructureKind::FullReal, n);
}

StructureSpace StructureSpace::sparsity_complex(int n, std::vector<IndexPair> pattern) {
    StructureSpace s(StructureKind::SparsityComplex, n);
    s.pattern_ = validate_pattern(n, std::move(pattern));
    return s;
}

StructureSpace StructureSpace::sparsity_real(int n, std::vector<IndexPair> pattern) {
    StructureSpace s(StructureKind::SparsityReal, n);
    s.pattern_ = validate_pattern(n, std::move(pattern));
    return s;
}

StructureSpace StructureSpace::toeplitz_band_real(int n, int lower, int upper) {
    if (lower < 0 || upper < 0 || lower >= n || upper >= n)
        throw DimensionMismatch("Toeplitz band out of range");
    StructureSpace s(StructureKind::ToeplitzBandReal, n);
    s.lower_ = lower;
    s.upper_ = upper;
    return s;
}

StructureSpace StructureSpace::from_basis(int n, std::vector<ComplexMatrix> basis) {
    StructureSpace s(StructureKind::Basis, n);
    // Gram-Schmidt under the real pairing; near-dependent members are dropped.
    for (ComplexMatrix b : basis) {
        if (b.rows() != n || b.cols() != n)
            throw DimensionMismatch("basis matrix has wrong shape");
        for (const ComplexMatrix& q : s.basis_) {
            const double c = frobenius_inner(q, b).real();
            b -= c * q;
        }
        const double nb = frobenius_norm(b);
        if (nb > 1e-12) {
            b *= Complex(1.0 / nb, 0.0);
            s.basis_.push_back(std::move(b));
        }
    }
    return s;
}

void StructureSpace::require_shape(const ComplexMatrix& z) const {
    if (z.rows() != n_ || z.cols() != n_)
        throw DimensionMismatch("projection input has wrong shape");
}

ComplexMatrix StructureSpace::project(const ComplexMatrix& z) const {
    require_shape(z);
    switch (kind_) {
    case StructureKind::FullComplex:
        return z;
    case StructureKind::FullReal:
        return z.real_part();
    case StructureKind::SparsityComplex: {
        ComplexMatrix out(n_, n_);
        for (const auto& [i, j] : pattern_) out(i, j) = z(i, j);
        return out;
    }
    case StructureKind::SparsityReal: {
        ComplexMatrix out(n_, n_);
        for (const auto& [i, j] : pattern_) out(i, j) = Complex(z(i, j).real(), 0.0);
        return out;
    }
    case StructureKind::ToeplitzBandReal: {
        // The indicator matrices of distinct diagonals are orthogonal under
        // the real pairing, so the projection replaces each in-band diagonal
        // by the mean of the real parts of its entries.
        ComplexMatrix out(n_, n_);
        for (int d = -lower_; d <= upper_; ++d) {
            double sum = 0.0;
            int count = 0;
            for (int i = 0; i < n_; ++i) {
                const int j = i + d;
                if (j < 0 || j >= n_) continue;
                sum += z(i, j).real();
                ++count;
            }
            if (count == 0) continue;
            const double mean = sum / count;
            for (int i = 0; i < n_; ++i) {
                const int j = i + d;
                if (j >= 0 && j < n_) out(i, j) = mean;
            }
        }
        return out;
    }
    case StructureKind::Basis: {
        ComplexMatrix out(n_, n_);
        for (const ComplexMatrix& q : basis_) {
            const double c = frobenius_inner(q, z).real();
            out += c * q;
        }
        return out;
    }
    }
    throw SolverError("unreachable structure kind");
}

double StructureSpace::membership_residual(const ComplexMatrix& z) const {
    return frobenius_norm(z - project(z));
}

int StructureSpace::real_dimension() const {
    switch (kind_) {
    case StructureKind::FullComplex:
        return 2 * n_ * n_;
    case StructureKind::FullReal:
        return n_ * n_;
    case StructureKind::SparsityComplex:
        return 2 * static_cast<int>(pattern_.size());
    case StructureKind::SparsityReal:
        return static_cast<int>(pattern_.size());
    case StructureKind::ToeplitzBandReal:
        return lower_ + upper_ + 1;
    case StructureKind::Basis:
        return static_cast<int>(basis_.size());
    }
    return 0;
}

std::string StructureSpace::description() const {
    switch (kind_) {
    case StructureKind::FullComplex:
        return "full-complex";
    case StructureKind::FullReal:
        return "full-real";
    case StructureKind::SparsityComplex:
        return "sparsity-complex(" + std::to_string(pattern_.size()) + " entries)";
    case StructureKind::SparsityReal:
        return "sparsity-real(" + std::to_string(pattern_.size()) + " entries)";
    case StructureKind::ToeplitzBandReal:
        return "toeplitz-real(" + std::to_string(lower_) + "," + std::to_string(upper_) + ")";
    case StructureKind::Basis:
        return "basis(" + std::to_string(basis_.size()) + ")";
    }
    return "?";
}

} // namespace stabrad
