#include "stabrad/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "stabrad/errors.hpp"
#include "stabrad/linalg.hpp"
#include "stabrad/rng.hpp"

namespace stabrad {
namespace {

constexpr double kPi = 3.14159265358979323846;

double polyline_length(const std::vector<Complex>& pts) {
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) len += std::abs(pts[i] - pts[i - 1]);
    return len;
}

// Clips a closed polygon to Re(z) <= 0 (Sutherland-Hodgman); the cut runs
// along the imaginary axis, which closes the contour there.
std::vector<Complex> clip_left_half_plane(const std::vector<Complex>& poly) {
    std::vector<Complex> out;
    if (poly.size() < 2) return out;
    // drop the duplicated closing point while clipping
    const size_t n = poly.size() - 1;
    for (size_t i = 0; i < n; ++i) {
        const Complex cur = poly[i];
        const Complex nxt = poly[(i + 1) % n];
        const bool cur_in = cur.real() <= 0.0;
        const bool nxt_in = nxt.real() <= 0.0;
        auto crossing = [&]() {
            const double t = cur.real() / (cur.real() - nxt.real());
            return Complex(0.0, cur.imag() + t * (nxt.imag() - cur.imag()));
        };
        if (cur_in) {
            out.push_back(cur);
            if (!nxt_in) out.push_back(crossing());
        } else if (nxt_in) {
            out.push_back(crossing());
        }
    }
    if (!out.empty()) out.push_back(out.front());
    return out;
}

} // namespace

ContourBound contour_bound(const ComplexMatrix& a, double eps, double delta,
                           const ResolventField& field) {
    if (eps <= 0.0) throw SolverError("contour_bound requires eps > 0");
    if (all_eigenvalues(a).front().real() >= 0.0)
        throw NotHurwitz("contour_bound: matrix is not Hurwitz");

    const double level = eps + delta;
    const std::vector<ContourPolyline> polylines = extract_level_set(field, level);
    if (polylines.empty())
        throw ContourEscapesWindow("level set not found inside the grid window");
    for (const ContourPolyline& p : polylines)
        if (!p.closed)
            throw ContourEscapesWindow("level set touches the grid boundary; enlarge the window");

    ContourBound result;
    result.eps = eps;
    double best_len = -1.0;
    for (const ContourPolyline& p : polylines) {
        std::vector<Complex> pts = p.points;
        if (std::abs(pts.front() - pts.back()) > 0.0) pts.push_back(pts.front());
        const std::vector<Complex> clipped = clip_left_half_plane(pts);
        if (clipped.size() < 3) continue; // component entirely in the right half-plane
        const double len = polyline_length(clipped);
        if (len <= 0.0) continue;
        result.gamma_length += len;
        ++result.components;
        if (len > best_len) {
            best_len = len;
            result.contour = clipped;
        }
    }
    if (result.components == 0)
        throw OpenContour("clipping the level set left no closed contour");
    result.bound = result.gamma_length / (2.0 * kPi * eps);
    return result;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& a) {
    if (!a.is_square()) throw DimensionMismatch("matrix_exponential: matrix must be square");
    if (!a.is_finite()) throw NonFiniteInput("matrix_exponential: non-finite entries");
    const int n = a.rows();

    // 1-norm for the scaling parameter
    double norm1 = 0.0;
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i) col += std::abs(a(i, j));
        norm1 = std::max(norm1, col);
    }

    const double theta13 = 5.371920351148152;
    int squarings = 0;
    if (norm1 > theta13)
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));

    ComplexMatrix as = a;
    if (squarings > 0) as *= Complex(std::ldexp(1.0, -squarings), 0.0);

    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};

    const ComplexMatrix ident = ComplexMatrix::identity(n);
    const ComplexMatrix a2 = as * as;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a2 * a4;

    ComplexMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    ComplexMatrix u = as * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    ComplexMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    ComplexMatrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

    ComplexMatrix r = solve_linear(v - u, v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

std::vector<ComplexVector> integrate_forced_ode(const ComplexMatrix& m,
                                                const std::function<ComplexVector(double)>& f,
                                                double T, int n_steps) {
    if (n_steps < 1) throw DimensionMismatch("integrate_forced_ode needs n_steps >= 1");
    const int n = m.rows();
    const double h = T / n_steps;
    std::vector<ComplexVector> out;
    out.reserve(n_steps + 1);
    ComplexVector y(n, Complex(0.0));
    out.push_back(y);
    double forcing_scale = 1.0;

    auto rhs = [&](const ComplexVector& yy, const ComplexVector& ff) {
        ComplexVector r = matvec(m, yy);
        for (int i = 0; i < n; ++i) r[i] += ff[i];
        return r;
    };

    for (int k = 0; k < n_steps; ++k) {
        const double t = k * h;
        const ComplexVector f0 = f(t);
        const ComplexVector fh = f(t + 0.5 * h);
        const ComplexVector f1 = f(t + h);
        forcing_scale = std::max(forcing_scale, vnorm(f0));

        const ComplexVector k1 = rhs(y, f0);
        ComplexVector y2 = y;
        for (int i = 0; i < n; ++i) y2[i] += 0.5 * h * k1[i];
        const ComplexVector k2 = rhs(y2, fh);
        ComplexVector y3 = y;
        for (int i = 0; i < n; ++i) y3[i] += 0.5 * h * k2[i];
        const ComplexVector k3 = rhs(y3, fh);
        ComplexVector y4 = y;
        for (int i = 0; i < n; ++i) y4[i] += h * k3[i];
        const ComplexVector k4 = rhs(y4, f1);

        for (int i = 0; i < n; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if (vnorm(y) > 1e12 * forcing_scale)
            throw StepSizeUnstable("solution norm blew up; increase n_steps");
        out.push_back(y);
    }
    return out;
}

double l2_norm_trapezoid(const std::vector<ComplexVector>& samples, double T) {
    if (samples.size() < 2) return 0.0;
    const double h = T / (static_cast<double>(samples.size()) - 1.0);
    double s = 0.0;
    for (size_t k = 0; k < samples.size(); ++k) {
        const double w = (k == 0 || k + 1 == samples.size()) ? 0.5 : 1.0;
        const double nk = vnorm(samples[k]);
        s += w * nk * nk;
    }
    return std::sqrt(h * s);
}

L2Report verify_l2_bound(const ComplexMatrix& a, const StructureSpace& s, double eps_used,
                         double delta, int n_perturbations, const Forcing& forcing, double T,
                         int n_steps, std::uint64_t rng_seed, const ComplexMatrix* extremal) {
    if (eps_used <= 0.0) throw SolverError("verify_l2_bound requires eps > 0");
    const int n = a.rows();
    Rng rng(rng_seed);

    // forcing sampler over [0, T]
    std::vector<ComplexVector> noise;
    if (forcing.kind == Forcing::Kind::PiecewiseConstantNoise) {
        noise.resize(std::max(1, forcing.noise_segments));
        for (ComplexVector& seg : noise) seg = rng.gaussian_vector(n);
    }
    ComplexVector harm_dir = forcing.direction;
    if (harm_dir.empty()) {
        harm_dir.assign(n, Complex(0.0));
        harm_dir[0] = 1.0;
    } else {
        harm_dir = normalized(std::move(harm_dir));
    }

    auto f = [&](double t) -> ComplexVector {
        switch (forcing.kind) {
        case Forcing::Kind::PiecewiseConstantNoise: {
            const size_t seg = std::min(
                noise.size() - 1, static_cast<size_t>(t / T * static_cast<double>(noise.size())));
            return noise[seg];
        }
        case Forcing::Kind::Harmonic: {
            const Complex phase = std::polar(1.0, forcing.omega * t);
            ComplexVector v = harm_dir;
            vscale(v, phase);
            return v;
        }
        case Forcing::Kind::Custom: {
            if (forcing.samples.size() < 2)
                throw DimensionMismatch("custom forcing needs at least 2 samples");
            const double pos = std::clamp(t / T, 0.0, 1.0) *
                               (static_cast<double>(forcing.samples.size()) - 1.0);
            const size_t k0 = std::min(forcing.samples.size() - 2, static_cast<size_t>(pos));
            const double w = pos - static_cast<double>(k0);
            ComplexVector v(n);
            for (int i = 0; i < n; ++i)
                v[i] = (1.0 - w) * forcing.samples[k0][i] + w * forcing.samples[k0 + 1][i];
            return v;
        }
        }
        return ComplexVector(n, Complex(0.0));
    };

    L2Report report;
    report.eps = eps_used;
    report.delta = delta;
    report.bound = 1.0 / eps_used;

    std::vector<ComplexMatrix> deltas;
    if (extremal) deltas.push_back(*extremal);
    for (int k = 0; k < n_perturbations; ++k) {
        ComplexMatrix d(n, n);
        if (delta > 0.0) {
            d = s.project(rng.gaussian_matrix(n, n));
            const double nd = frobenius_norm(d);
            if (nd > 1e-300)
                d *= Complex(delta * std::pow(rng.uniform(), 1.0 / s.real_dimension()) / nd, 0.0);
        }
        deltas.push_back(std::move(d));
    }
    report.n_samples = static_cast<int>(deltas.size());

    // f is sampled once on the grid so every perturbation sees the same input
    std::vector<ComplexVector> f_samples;
    f_samples.reserve(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) f_samples.push_back(f(T * k / n_steps));
    const double f_l2 = l2_norm_trapezoid(f_samples, T);
    if (f_l2 <= 0.0) throw SolverError("forcing has zero L2 norm");

    for (int idx = 0; idx < static_cast<int>(deltas.size()); ++idx) {
        const ComplexMatrix m = a + deltas[idx];
        const std::vector<ComplexVector> y = integrate_forced_ode(m, f, T, n_steps);
        const double ratio = l2_norm_trapezoid(y, T) / f_l2;
        report.ratios.push_back(ratio);
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (ratio > report.bound * (1.0 + report.tol_quad)) report.violations.push_back(idx);
    }
    return report;
}

} // namespace stabrad
