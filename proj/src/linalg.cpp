#include "stabrad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabrad/errors.hpp"

// Dense kernels are delegated to LAPACK (zgeev: balancing + Hessenberg +
// implicitly shifted QR + eigenvectors; zgesvd for singular values; zgesv
// for linear solves). Row-major storage is transposed at this boundary.
extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, stabrad::Complex* a,
            const int* lda, stabrad::Complex* w, stabrad::Complex* vl, const int* ldvl,
            stabrad::Complex* vr, const int* ldvr, stabrad::Complex* work, const int* lwork,
            double* rwork, int* info);
void zgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n,
             stabrad::Complex* a, const int* lda, double* s, stabrad::Complex* u,
             const int* ldu, stabrad::Complex* vt, const int* ldvt, stabrad::Complex* work,
             const int* lwork, double* rwork, int* info);
void zgesv_(const int* n, const int* nrhs, stabrad::Complex* a, const int* lda, int* ipiv,
            stabrad::Complex* b, const int* ldb, int* info);
void zgetrf_(const int* m, const int* n, stabrad::Complex* a, const int* lda, int* ipiv,
             int* info);
void zgetrs_(const char* trans, const int* n, const int* nrhs, const stabrad::Complex* a,
             const int* lda, const int* ipiv, stabrad::Complex* b, const int* ldb, int* info);
}

namespace stabrad {
namespace {

void require_square_finite(const ComplexMatrix& m, const char* who) {
    if (!m.is_square()) throw DimensionMismatch(std::string(who) + ": matrix must be square");
    if (m.rows() == 0) throw DimensionMismatch(std::string(who) + ": empty matrix");
    if (!m.is_finite()) throw NonFiniteInput(std::string(who) + ": non-finite entries");
}

// Column-major copy for LAPACK.
std::vector<Complex> to_column_major(const ComplexMatrix& m) {
    std::vector<Complex> a(static_cast<size_t>(m.rows()) * m.cols());
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i) a[static_cast<size_t>(j) * m.rows() + i] = m(i, j);
    return a;
}

struct EigDecomposition {
    std::vector<Complex> values;
    std::vector<Complex> vl; // column-major left eigenvectors (empty if not requested)
    std::vector<Complex> vr; // column-major right eigenvectors
};

EigDecomposition zgeev(const ComplexMatrix& m, bool vectors) {
    const int n = m.rows();
    EigDecomposition d;
    d.values.resize(n);
    std::vector<Complex> a = to_column_major(m);
    const char* job = vectors ? "V" : "N";
    if (vectors) {
        d.vl.resize(static_cast<size_t>(n) * n);
        d.vr.resize(static_cast<size_t>(n) * n);
    }
    Complex* vl = vectors ? d.vl.data() : nullptr;
    Complex* vr = vectors ? d.vr.data() : nullptr;
    int lwork = -1, info = 0;
    Complex work_query;
    std::vector<double> rwork(static_cast<size_t>(2) * n);
    zgeev_(job, job, &n, a.data(), &n, d.values.data(), vl, &n, vr, &n, &work_query, &lwork,
           rwork.data(), &info);
    lwork = std::max(1, static_cast<int>(work_query.real()));
    std::vector<Complex> work(lwork);
    zgeev_(job, job, &n, a.data(), &n, d.values.data(), vl, &n, vr, &n, work.data(), &lwork,
           rwork.data(), &info);
    if (info < 0) throw SolverError("zgeev: illegal argument");
    if (info > 0) throw NonConvergence("eigensolver QR iteration failed to converge");
    return d;
}

bool rightmost_before(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

// Rotates v by a unit phase so that ref* v becomes real positive. No-op when
// |ref* v| is negligible.
void align_phase(ComplexVector& v, const ComplexVector& ref) {
    const Complex p = vdot(v, ref); // v* ref
    const double ap = std::abs(p);
    if (ap < 1e-300) return;
    // (c v)* ref = conj(c) p; choose conj(c) = |p|/p.
    const Complex c = std::conj(Complex(ap, 0.0) / p);
    vscale(v, c);
}

} // namespace

double eig_tolerance(const ComplexMatrix& m) { return 1e-10 * frobenius_norm(m); }

namespace {

// Normalization shared by the dense solve and the warm refinement: unit
// norms, phase fixing (anchor or largest entry of x), x*y real positive.
void finalize_triple(EigenTriple& t, const ComplexVector* phase_anchor) {
    t.x = normalized(std::move(t.x));
    t.y = normalized(std::move(t.y));
    const double overlap = std::abs(vdot(t.x, t.y));
    if (overlap < 1e-14)
        throw DegenerateEigenvalue("rightmost eigenvalue is defective (|x*y| < 1e-14)");
    if (phase_anchor) {
        align_phase(t.x, *phase_anchor);
    } else {
        // Canonical phase: make the largest-magnitude entry of x real positive,
        // so the triple is deterministic regardless of internal phases.
        int imax = 0;
        for (size_t i = 1; i < t.x.size(); ++i)
            if (std::abs(t.x[i]) > std::abs(t.x[imax])) imax = static_cast<int>(i);
        ComplexVector e(t.x.size(), Complex(0.0));
        e[imax] = 1.0;
        align_phase(t.x, e);
    }
    align_phase(t.y, t.x); // now x*y = conj(y* x) is real positive
    t.kappa = 1.0 / vdot(t.x, t.y).real();
}

} // namespace

EigenTriple rightmost_eigentriple(const ComplexMatrix& m, const ComplexVector* phase_anchor) {
    require_square_finite(m, "rightmost_eigentriple");
    const int n = m.rows();
    if (phase_anchor && static_cast<int>(phase_anchor->size()) != n)
        throw DimensionMismatch("rightmost_eigentriple: phase anchor size mismatch");

    EigDecomposition d = zgeev(m, true);

    int best = 0;
    for (int j = 1; j < n; ++j)
        if (rightmost_before(d.values[j], d.values[best])) best = j;

    EigenTriple t;
    t.lambda = d.values[best];
    t.x.assign(d.vl.begin() + static_cast<size_t>(best) * n,
               d.vl.begin() + static_cast<size_t>(best + 1) * n);
    t.y.assign(d.vr.begin() + static_cast<size_t>(best) * n,
               d.vr.begin() + static_cast<size_t>(best + 1) * n);
    finalize_triple(t, phase_anchor);

    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        if (j != best) gap = std::min(gap, t.lambda.real() - d.values[j].real());
    t.gap = gap;
    t.tight_gap = (gap < 1e-8);
    return t;
}

std::optional<EigenTriple> refine_eigentriple(const ComplexMatrix& m, const EigenTriple& hint,
                                              const ComplexVector* phase_anchor) {
    require_square_finite(m, "refine_eigentriple");
    const int n = m.rows();
    if (static_cast<int>(hint.x.size()) != n || static_cast<int>(hint.y.size()) != n)
        return std::nullopt;
    const double tol = eig_tolerance(m);
    Complex sigma = hint.lambda;
    ComplexVector x = hint.x;
    ComplexVector y = hint.y;

    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<Complex> lu = to_column_major(m);
        for (int i = 0; i < n; ++i) lu[static_cast<size_t>(i) * n + i] -= sigma;
        std::vector<int> ipiv(n);
        int info = 0;
        zgetrf_(&n, &n, lu.data(), &n, ipiv.data(), &info);
        if (info != 0) {
            // the shift hit an eigenvalue exactly; nudge it off
            sigma += Complex(std::max(tol, 1e-14), 0.0);
            continue;
        }
        auto apply_inverse = [&](const char* trans, ComplexVector& v) {
            int one = 1, solve_info = 0;
            zgetrs_(trans, &n, &one, lu.data(), &n, ipiv.data(), v.data(), &n, &solve_info);
            return solve_info == 0;
        };
        for (int sweep = 0; sweep < 2; ++sweep) {
            if (!apply_inverse("N", y)) return std::nullopt;
            const double ny = vnorm(y);
            if (!(ny > 0.0) || !std::isfinite(ny)) return std::nullopt;
            vscale(y, Complex(1.0 / ny, 0.0));
            if (!apply_inverse("C", x)) return std::nullopt;
            const double nx = vnorm(x);
            if (!(nx > 0.0) || !std::isfinite(nx)) return std::nullopt;
            vscale(x, Complex(1.0 / nx, 0.0));
        }

        const Complex xy = vdot(x, y);
        if (std::abs(xy) < 1e-14) return std::nullopt;
        const ComplexVector my = matvec(m, y);
        const Complex lambda = vdot(x, my) / xy; // two-sided Rayleigh quotient

        ComplexVector ry = my;
        for (int i = 0; i < n; ++i) ry[i] -= lambda * y[i];
        ComplexVector rx = adjoint_matvec(m, x);
        for (int i = 0; i < n; ++i) rx[i] -= std::conj(lambda) * x[i];
        if (vnorm(ry) <= tol && vnorm(rx) <= tol) {
            EigenTriple t;
            t.lambda = lambda;
            t.x = std::move(x);
            t.y = std::move(y);
            try {
                finalize_triple(t, phase_anchor);
            } catch (const DegenerateEigenvalue&) {
                return std::nullopt; // let the dense solve judge
            }
            t.gap = hint.gap; // stale diagnostic, refreshed by dense solves
            t.tight_gap = hint.tight_gap;
            return t;
        }
        sigma = lambda;
    }
    return std::nullopt;
}

std::vector<Complex> all_eigenvalues(const ComplexMatrix& m) {
    require_square_finite(m, "all_eigenvalues");
    EigDecomposition d = zgeev(m, false);
    std::sort(d.values.begin(), d.values.end(), rightmost_before);
    return d.values;
}

double smallest_singular_value(const ComplexMatrix& m) {
    require_square_finite(m, "smallest_singular_value");
    const int n = m.rows();
    std::vector<Complex> a = to_column_major(m);
    std::vector<double> s(n);
    std::vector<double> rwork(static_cast<size_t>(5) * n);
    int lwork = -1, info = 0;
    Complex work_query;
    zgesvd_("N", "N", &n, &n, a.data(), &n, s.data(), nullptr, &n, nullptr, &n, &work_query,
            &lwork, rwork.data(), &info);
    lwork = std::max(1, static_cast<int>(work_query.real()));
    std::vector<Complex> work(lwork);
    zgesvd_("N", "N", &n, &n, a.data(), &n, s.data(), nullptr, &n, nullptr, &n, work.data(),
            &lwork, rwork.data(), &info);
    if (info != 0) throw NonConvergence("zgesvd failed to converge");
    return s[n - 1];
}

double spectral_norm(const ComplexMatrix& m) {
    require_square_finite(m, "spectral_norm");
    const int n = m.rows();
    std::vector<Complex> a = to_column_major(m);
    std::vector<double> s(n);
    std::vector<double> rwork(static_cast<size_t>(5) * n);
    int lwork = -1, info = 0;
    Complex work_query;
    zgesvd_("N", "N", &n, &n, a.data(), &n, s.data(), nullptr, &n, nullptr, &n, &work_query,
            &lwork, rwork.data(), &info);
    lwork = std::max(1, static_cast<int>(work_query.real()));
    std::vector<Complex> work(lwork);
    zgesvd_("N", "N", &n, &n, a.data(), &n, s.data(), nullptr, &n, nullptr, &n, work.data(),
            &lwork, rwork.data(), &info);
    if (info != 0) throw NonConvergence("zgesvd failed to converge");
    return s[0];
}

ComplexMatrix solve_linear(ComplexMatrix a, ComplexMatrix b) {
    require_square_finite(a, "solve_linear");
    if (a.rows() != b.rows()) throw DimensionMismatch("solve_linear: rhs row mismatch");
    const int n = a.rows();
    const int nrhs = b.cols();
    std::vector<Complex> af = to_column_major(a);
    std::vector<Complex> bf = to_column_major(b);
    std::vector<int> ipiv(n);
    int info = 0;
    zgesv_(&n, &nrhs, af.data(), &n, ipiv.data(), bf.data(), &n, &info);
    if (info > 0) throw SolverError("solve_linear: matrix is singular");
    if (info < 0) throw SolverError("zgesv: illegal argument");
    ComplexMatrix x(n, nrhs);
    for (int j = 0; j < nrhs; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = bf[static_cast<size_t>(j) * n + i];
    return x;
}

ComplexMatrix inverse(const ComplexMatrix& a) {
    return solve_linear(a, ComplexMatrix::identity(a.rows()));
}

} // namespace stabrad
