#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stabrad/linalg.hpp"

namespace stabrad::oracle {

void hermitian_eigendecomposition(const ComplexMatrix& h, std::vector<double>& w,
                                  ComplexMatrix& v) {
    const int n = h.rows();
    ComplexMatrix a = h;
    v = ComplexMatrix::identity(n);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (off < 1e-30 * std::max(1.0, frobenius_norm(h))) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                // Unitary 2x2 rotation annihilating a(p,q): first strip the
                // phase of a(p,q), then a real Jacobi rotation.
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const Complex phase = apq / std::abs(apq);
                const double beta = std::abs(apq);
                const double tau = (aqq - app) / (2.0 * beta);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // columns p, q of the rotation: [c, -s*conj(phase); s*phase, c]
                for (int k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp - s * std::conj(phase) * akq;
                    a(k, q) = s * phase * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * std::conj(phase) * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = c * vkp - s * std::conj(phase) * vkq;
                    v(k, q) = s * phase * vkp + c * vkq;
                }
            }
        }
    }
    w.resize(n);
    for (int i = 0; i < n; ++i) w[i] = a(i, i).real();
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    std::vector<double> w;
    ComplexMatrix v;
    hermitian_eigendecomposition(h, w, v);
    std::sort(w.begin(), w.end());
    return w;
}

double smallest_singular_value(const ComplexMatrix& m) {
    const ComplexMatrix gram = m.adjoint() * m;
    const std::vector<double> w = hermitian_eigenvalues(gram);
    return std::sqrt(std::max(0.0, w.front()));
}

double spectral_norm_power_iteration(const ComplexMatrix& m, int iterations) {
    ComplexVector x(m.cols(), Complex(0.0));
    for (size_t i = 0; i < x.size(); ++i)
        x[i] = Complex(std::cos(1.7 * static_cast<double>(i) + 0.3),
                       std::sin(0.9 * static_cast<double>(i) + 1.1));
    x = normalized(std::move(x));
    double value = 0.0;
    for (int it = 0; it < iterations; ++it) {
        ComplexVector y = adjoint_matvec(m, matvec(m, x));
        const double ny = vnorm(y);
        if (ny == 0.0) return 0.0;
        vscale(y, Complex(1.0 / ny, 0.0));
        x = std::move(y);
        value = ny;
    }
    return std::sqrt(value);
}

ComplexMatrix inverse_gauss_jordan(const ComplexMatrix& m) {
    const int n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) < 1e-300)
            throw std::runtime_error("inverse_gauss_jordan: singular matrix");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const Complex d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = a(r, col);
            if (f == Complex(0.0)) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

std::vector<ComplexMatrix> structure_basis(const StructureSpace& s) {
    const int n = s.dim();
    std::vector<ComplexMatrix> basis;
    auto unit = [&](int i, int j, Complex v) {
        ComplexMatrix m(n, n);
        m(i, j) = v;
        return m;
    };
    switch (s.kind()) {
    case StructureKind::FullComplex:
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                basis.push_back(unit(i, j, Complex(1.0, 0.0)));
                basis.push_back(unit(i, j, Complex(0.0, 1.0)));
            }
        break;
    case StructureKind::FullReal:
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) basis.push_back(unit(i, j, Complex(1.0, 0.0)));
        break;
    case StructureKind::SparsityComplex:
        for (const auto& [i, j] : s.pattern()) {
            basis.push_back(unit(i, j, Complex(1.0, 0.0)));
            basis.push_back(unit(i, j, Complex(0.0, 1.0)));
        }
        break;
    case StructureKind::SparsityReal:
        for (const auto& [i, j] : s.pattern()) basis.push_back(unit(i, j, Complex(1.0, 0.0)));
        break;
    case StructureKind::ToeplitzBandReal: {
        const auto [p, q] = s.band();
        for (int d = -p; d <= q; ++d) {
            ComplexMatrix m(n, n);
            for (int i = 0; i < n; ++i) {
                const int j = i + d;
                if (j >= 0 && j < n) m(i, j) = 1.0;
            }
            basis.push_back(std::move(m));
        }
        break;
    }
    case StructureKind::Basis:
        basis = s.basis();
        break;
    }
    return basis;
}

ComplexMatrix least_squares_projection(const StructureSpace& s, const ComplexMatrix& z) {
    const std::vector<ComplexMatrix> basis = structure_basis(s);
    const int m = static_cast<int>(basis.size());
    if (m == 0) return ComplexMatrix(s.dim(), s.dim());

    // normal equations over the real pairing
    std::vector<double> gram(static_cast<size_t>(m) * m);
    std::vector<double> rhs(m);
    for (int i = 0; i < m; ++i) {
        rhs[i] = frobenius_inner(basis[i], z).real();
        for (int j = 0; j < m; ++j)
            gram[static_cast<size_t>(i) * m + j] = frobenius_inner(basis[i], basis[j]).real();
    }
    // real Gaussian elimination with partial pivoting
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(gram[static_cast<size_t>(r) * m + col]) >
                std::abs(gram[static_cast<size_t>(pivot) * m + col]))
                pivot = r;
        if (pivot != col) {
            for (int j = 0; j < m; ++j)
                std::swap(gram[static_cast<size_t>(pivot) * m + j],
                          gram[static_cast<size_t>(col) * m + j]);
            std::swap(rhs[pivot], rhs[col]);
        }
        const double d = gram[static_cast<size_t>(col) * m + col];
        if (std::abs(d) < 1e-300)
            throw std::runtime_error("least_squares_projection: singular Gram matrix");
        for (int r = col + 1; r < m; ++r) {
            const double f = gram[static_cast<size_t>(r) * m + col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < m; ++j)
                gram[static_cast<size_t>(r) * m + j] -= f * gram[static_cast<size_t>(col) * m + j];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> coef(m);
    for (int r = m - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int j = r + 1; j < m; ++j) acc -= gram[static_cast<size_t>(r) * m + j] * coef[j];
        coef[r] = acc / gram[static_cast<size_t>(r) * m + r];
    }

    ComplexMatrix out(s.dim(), s.dim());
    for (int i = 0; i < m; ++i) out += coef[i] * basis[i];
    return out;
}

ComplexMatrix random_stable_real(Rng& rng, int n, double margin) {
    ComplexMatrix a = rng.gaussian_real_matrix(n, n);
    const std::vector<Complex> eigs = all_eigenvalues(a);
    double alpha = eigs.front().real();
    for (int i = 0; i < n; ++i) a(i, i) -= alpha + margin;
    return a;
}

} // namespace stabrad::oracle
