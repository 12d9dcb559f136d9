#include "stabrad/pseudospectra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "stabrad/errors.hpp"
#include "stabrad/parallel.hpp"
#include "stabrad/rng.hpp"

namespace stabrad {

void GridSpec::validate() const {
    if (!(re_min < re_max) || !(im_min < im_max))
        throw DimensionMismatch("grid window is empty");
    if (nx < 2 || ny < 2) throw DimensionMismatch("grid needs at least 2x2 nodes");
}

ResolventField resolvent_field(const ComplexMatrix& a, const GridSpec& grid) {
    grid.validate();
    if (!a.is_square()) throw DimensionMismatch("resolvent_field: matrix must be square");
    const int n = a.rows();
    ResolventField field;
    field.grid = grid;
    field.values.assign(static_cast<size_t>(grid.nx) * grid.ny, 0.0);
    parallel_for(static_cast<long>(grid.nx) * grid.ny, [&](long idx) {
        const int ix = static_cast<int>(idx / grid.ny);
        const int iy = static_cast<int>(idx % grid.ny);
        ComplexMatrix shifted = a;
        const Complex lambda = grid.node(ix, iy);
        for (int i = 0; i < n; ++i) shifted(i, i) -= lambda;
        field.values[idx] = smallest_singular_value(shifted);
    });
    return field;
}

GridSpec default_grid(const ComplexMatrix& a, double margin, int nx, int ny) {
    const std::vector<Complex> eigs = all_eigenvalues(a);
    double re_min = eigs.front().real(), re_max = eigs.front().real();
    double im_min = eigs.front().imag(), im_max = eigs.front().imag();
    for (const Complex& z : eigs) {
        re_min = std::min(re_min, z.real());
        re_max = std::max(re_max, z.real());
        im_min = std::min(im_min, z.imag());
        im_max = std::max(im_max, z.imag());
    }
    const double re_pad = std::max(margin * (re_max - re_min), 1.0);
    const double im_pad = std::max(margin * (im_max - im_min), 1.0);
    return GridSpec{re_min - re_pad, re_max + re_pad, im_min - im_pad, im_max + im_pad, nx, ny};
}

namespace {

double sigma_on_axis(const ComplexMatrix& a, double omega) {
    ComplexMatrix shifted = a;
    for (int i = 0; i < a.rows(); ++i) shifted(i, i) -= Complex(0.0, omega);
    return smallest_singular_value(shifted);
}

} // namespace

AxisSweepResult axis_sweep(const ComplexMatrix& a, double omega_lo, double omega_hi,
                           int n_points) {
    if (n_points < 2) throw DimensionMismatch("axis_sweep needs at least 2 points");
    std::vector<double> sigmas(n_points);
    parallel_for(n_points, [&](long i) {
        const double w = omega_lo + (omega_hi - omega_lo) * i / (n_points - 1);
        sigmas[i] = sigma_on_axis(a, w);
    });
    int best = 0;
    for (int i = 1; i < n_points; ++i)
        if (sigmas[i] < sigmas[best]) best = i;

    const double hgrid = (omega_hi - omega_lo) / (n_points - 1);
    double lo = omega_lo + hgrid * std::max(0, best - 1);
    double hi = omega_lo + hgrid * std::min(n_points - 1, best + 1);

    // golden-section refinement around the best node
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = sigma_on_axis(a, x1);
    double f2 = sigma_on_axis(a, x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1.0 + std::abs(lo)); ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sigma_on_axis(a, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sigma_on_axis(a, x2);
        }
    }
    const double w = 0.5 * (lo + hi);
    return {w, sigma_on_axis(a, w)};
}

AxisSweepResult axis_sweep_auto(const ComplexMatrix& a, int n_points) {
    const double w = 2.0 * frobenius_norm(a);
    return axis_sweep(a, -w, w, n_points);
}

std::vector<EigenCloud> joint_pseudospectrum_sample(const ComplexMatrix& a,
                                                    const StructureSpace& s, double eps,
                                                    double delta, int n_samples,
                                                    std::uint64_t rng_seed, bool fixed_radius) {
    if (n_samples < 1) throw DimensionMismatch("need at least one sample");
    const int n = a.rows();
    Rng rng(rng_seed);

    // Draw all perturbations up front so sampling stays deterministic, then
    // evaluate the spectra on the worker pool.
    std::vector<EigenCloud> clouds(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        ComplexMatrix d(n, n);
        if (delta > 0.0) {
            d = s.project(rng.gaussian_matrix(n, n));
            const double nd = frobenius_norm(d);
            if (nd > 1e-300) {
                double r = delta;
                if (!fixed_radius) r *= std::pow(rng.uniform(), 1.0 / s.real_dimension());
                d *= Complex(r / nd, 0.0);
            }
        }
        ComplexMatrix t(n, n);
        if (eps > 0.0) {
            t = rng.gaussian_matrix(n, n);
            const double nt = frobenius_norm(t);
            if (nt > 1e-300) {
                double r = eps;
                if (!fixed_radius) r *= std::pow(rng.uniform(), 1.0 / (2.0 * n * n));
                t *= Complex(r / nt, 0.0);
            }
        }
        clouds[k].delta_sample = std::move(d);
        clouds[k].theta_sample = std::move(t);
    }

    parallel_for(n_samples, [&](long k) {
        clouds[k].eigenvalues =
            all_eigenvalues(a + clouds[k].delta_sample + clouds[k].theta_sample);
    });
    return clouds;
}

// -- marching squares --------------------------------------------------------

namespace {

struct EdgeKey {
    int ix, iy, orient; // orient: 0 horizontal (to ix+1), 1 vertical (to iy+1)
    bool operator<(const EdgeKey& o) const {
        if (ix != o.ix) return ix < o.ix;
        if (iy != o.iy) return iy < o.iy;
        return orient < o.orient;
    }
};

struct Segment {
    EdgeKey a, b;
};

} // namespace

std::vector<ContourPolyline> extract_level_set(const ResolventField& field, double level) {
    if (level <= 0.0) throw DimensionMismatch("level must be positive");
    const GridSpec& g = field.grid;
    const double L = std::log(level);
    auto logval = [&](int ix, int iy) { return std::log(std::max(field.at(ix, iy), 1e-300)); };
    auto inside = [&](int ix, int iy) { return logval(ix, iy) < L; };

    auto edge_point = [&](const EdgeKey& e) {
        const int ix2 = e.orient == 0 ? e.ix + 1 : e.ix;
        const int iy2 = e.orient == 0 ? e.iy : e.iy + 1;
        const double ga = logval(e.ix, e.iy);
        const double gb = logval(ix2, iy2);
        double t = (gb == ga) ? 0.5 : (L - ga) / (gb - ga);
        t = std::clamp(t, 0.0, 1.0);
        const Complex pa = g.node(e.ix, e.iy);
        const Complex pb = g.node(ix2, iy2);
        return pa + t * (pb - pa);
    };

    std::vector<Segment> segments;
    for (int ix = 0; ix + 1 < g.nx; ++ix) {
        for (int iy = 0; iy + 1 < g.ny; ++iy) {
            int mask = 0;
            if (inside(ix, iy)) mask |= 1;         // bottom-left
            if (inside(ix + 1, iy)) mask |= 2;     // bottom-right
            if (inside(ix + 1, iy + 1)) mask |= 4; // top-right
            if (inside(ix, iy + 1)) mask |= 8;     // top-left
            if (mask == 0 || mask == 15) continue;

            const EdgeKey bottom{ix, iy, 0};
            const EdgeKey top{ix, iy + 1, 0};
            const EdgeKey left{ix, iy, 1};
            const EdgeKey right{ix + 1, iy, 1};
            auto emit = [&](EdgeKey a, EdgeKey b) { segments.push_back({a, b}); };

            switch (mask) {
            case 1: case 14: emit(left, bottom); break;
            case 2: case 13: emit(bottom, right); break;
            case 3: case 12: emit(left, right); break;
            case 4: case 11: emit(right, top); break;
            case 6: case 9: emit(bottom, top); break;
            case 7: case 8: emit(top, left); break;
            case 5: case 10: {
                // saddle: split by the cell-center value
                const double center = 0.25 * (logval(ix, iy) + logval(ix + 1, iy) +
                                              logval(ix, iy + 1) + logval(ix + 1, iy + 1));
                const bool center_inside = center < L;
                const bool diag_bl = (mask == 5); // inside corners on the BL-TR diagonal
                if (diag_bl == center_inside) {
                    emit(bottom, right);
                    emit(top, left);
                } else {
                    emit(left, bottom);
                    emit(right, top);
                }
                break;
            }
            default: break;
            }
        }
    }

    // Chain segments into polylines by shared grid edges.
    std::map<EdgeKey, std::vector<int>> by_edge;
    for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
        by_edge[segments[i].a].push_back(i);
        by_edge[segments[i].b].push_back(i);
    }

    std::vector<bool> used(segments.size(), false);
    std::vector<ContourPolyline> polylines;

    auto same = [](const EdgeKey& a, const EdgeKey& b) { return !(a < b) && !(b < a); };
    auto other_end = [&](int seg, const EdgeKey& from) {
        return same(segments[seg].a, from) ? segments[seg].b : segments[seg].a;
    };
    auto next_unused = [&](const EdgeKey& at) {
        for (int cand : by_edge[at])
            if (!used[cand]) return cand;
        return -1;
    };

    for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::deque<EdgeKey> chain = {segments[i].a, segments[i].b};
        for (;;) { // extend past the back
            const int seg = next_unused(chain.back());
            if (seg < 0) break;
            used[seg] = true;
            chain.push_back(other_end(seg, chain.back()));
        }
        for (;;) { // extend past the front
            const int seg = next_unused(chain.front());
            if (seg < 0) break;
            used[seg] = true;
            chain.push_front(other_end(seg, chain.front()));
        }

        ContourPolyline poly;
        poly.points.reserve(chain.size());
        for (const EdgeKey& e : chain) poly.points.push_back(edge_point(e));
        poly.closed = chain.size() > 2 && same(chain.front(), chain.back());
        polylines.push_back(std::move(poly));
    }
    return polylines;
}

} // namespace stabrad
