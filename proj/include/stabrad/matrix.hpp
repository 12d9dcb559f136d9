#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "stabrad/errors.hpp"

namespace stabrad {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense complex matrix, row-major storage, value semantics.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
    }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const Complex& operator()(int i, int j) const {
        return data_[static_cast<size_t>(i) * cols_ + j];
    }

    Complex* data() { return data_.data(); }
    const Complex* data() const { return data_.data(); }

    bool is_finite() const {
        for (const Complex& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    bool is_real(double tol = 0.0) const {
        for (const Complex& z : data_)
            if (std::abs(z.imag()) > tol) return false;
        return true;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix a(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) a(j, i) = std::conj((*this)(i, j));
        return a;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix a(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) a(j, i) = (*this)(i, j);
        return a;
    }

    ComplexMatrix real_part() const {
        ComplexMatrix a(rows_, cols_);
        for (size_t k = 0; k < data_.size(); ++k) a.data_[k] = Complex(data_[k].real(), 0.0);
        return a;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& other) {
        require_same_shape(other);
        for (size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& other) {
        require_same_shape(other);
        for (size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }

    ComplexMatrix& operator*=(Complex s) {
        for (Complex& z : data_) z *= s;
        return *this;
    }

private:
    void require_same_shape(const ComplexMatrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw DimensionMismatch("matrix shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
inline ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
inline ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex(s, 0.0); }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul shape mismatch");
    ComplexMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

/// Frobenius inner product <X,Y> = trace(X* Y) = sum conj(x_ij) y_ij.
inline Complex frobenius_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionMismatch("frobenius_inner shape mismatch");
    Complex s = 0.0;
    const size_t n = static_cast<size_t>(x.rows()) * x.cols();
    for (size_t k = 0; k < n; ++k) s += std::conj(x.data()[k]) * y.data()[k];
    return s;
}

inline double frobenius_norm(const ComplexMatrix& x) {
    double s = 0.0;
    const size_t n = static_cast<size_t>(x.rows()) * x.cols();
    for (size_t k = 0; k < n; ++k) s += std::norm(x.data()[k]);
    return std::sqrt(s);
}

/// Rank-1 matrix u v* from two vectors.
inline ComplexMatrix outer_product(const ComplexVector& u, const ComplexVector& v) {
    ComplexMatrix m(static_cast<int>(u.size()), static_cast<int>(v.size()));
    for (size_t i = 0; i < u.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = u[i] * std::conj(v[j]);
    return m;
}

inline ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.cols() != static_cast<int>(x.size())) throw DimensionMismatch("matvec shape mismatch");
    ComplexVector y(a.rows(), Complex(0.0));
    for (int i = 0; i < a.rows(); ++i) {
        Complex s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// y = A* x without forming the adjoint.
inline ComplexVector adjoint_matvec(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.rows() != static_cast<int>(x.size()))
        throw DimensionMismatch("adjoint_matvec shape mismatch");
    ComplexVector y(a.cols(), Complex(0.0));
    for (int i = 0; i < a.rows(); ++i) {
        const Complex xi = x[i];
        for (int j = 0; j < a.cols(); ++j) y[j] += std::conj(a(i, j)) * xi;
    }
    return y;
}

// -- vector helpers --------------------------------------------------------

/// Conjugated dot product a* b.
inline Complex vdot(const ComplexVector& a, const ComplexVector& b) {
    Complex s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double vnorm(const ComplexVector& a) {
    double s = 0.0;
    for (const Complex& z : a) s += std::norm(z);
    return std::sqrt(s);
}

inline void vscale(ComplexVector& a, Complex s) {
    for (Complex& z : a) z *= s;
}

inline ComplexVector normalized(ComplexVector a) {
    const double n = vnorm(a);
    if (n == 0.0) throw SolverError("cannot normalize zero vector");
    vscale(a, Complex(1.0 / n, 0.0));
    return a;
}

} // namespace stabrad
