#include "stabrad/outer.hpp"

#include <algorithm>
#include <cmath>

#include "stabrad/errors.hpp"

namespace stabrad {
namespace {

double spectral_abscissa(const ComplexMatrix& a) {
    return all_eigenvalues(a).front().real();
}

struct Bracket {
    double lb;
    double ub;
    void update(double param, double re) {
        if (re > 0.0)
            ub = std::min(ub, param);
        else
            lb = std::max(lb, param);
    }
    bool contains(double param) const { return param >= lb && param <= ub; }
};

} // namespace

double phi_derivative(const EigenTriple& triple, const StructureSpace& s) {
    const double p = frobenius_norm(s.project(outer_product(triple.x, triple.y)));
    if (p < 1e-14)
        throw ZeroStructuredGradient("||Pi^S(x y*)||_F vanishes; Newton step undefined");
    return -triple.kappa * p;
}

double psi_derivative(const EigenTriple& triple) { return -triple.kappa; }

OuterTrace solve_radius(const ComplexMatrix& a, const StructureSpace& s,
                        const OuterConfig& config) {
    if (!a.is_square()) throw DimensionMismatch("solve_radius: matrix must be square");
    if (!a.is_finite()) throw NonFiniteInput("solve_radius: non-finite matrix");
    const bool delta_mode = (config.mode == OuterMode::SolveDelta);
    if (delta_mode && config.eps <= 0.0)
        throw SolverError("SolveDelta requires a positive fixed eps");
    if (!delta_mode && config.delta < 0.0)
        throw SolverError("SolveEps requires a nonnegative fixed delta");

    OuterTrace trace;
    trace.mode = config.mode;

    const double alpha = spectral_abscissa(a);
    if (alpha >= 0.0)
        throw NotHurwitz("matrix is not Hurwitz (spectral abscissa " + std::to_string(alpha) +
                         ")");
    if (alpha > -1e-10)
        trace.warnings.push_back("spectral abscissa within 1e-10 of the imaginary axis");

    auto run_inner = [&](double param, const std::optional<RankOneState>& init) {
        const double eps = delta_mode ? config.eps : param;
        const double delta = delta_mode ? param : config.delta;
        if (config.full_flow) return solve_inner_full(a, s, eps, delta, config.inner);
        return solve_inner(a, s, eps, delta, init, config.inner);
    };

    double param = config.param0;
    if (std::isnan(param)) param = delta_mode ? 0.0 : 1e-2;

    InnerResult inner = run_inner(param, std::nullopt);
    double re = inner.re_lambda;
    trace.rows.push_back({1, param, re, inner.steps});
    if (!inner.converged)
        trace.warnings.push_back("inner iteration 1 did not reach the stationarity tolerance");
    if (delta_mode && re >= 0.0)
        trace.warnings.push_back(
            "phi_eps(0) >= 0: eps is at or above the stability radius of A");

    Bracket bracket{config.lb, config.ub};
    bracket.update(param, re);

    double tol = config.tol0; // 0 = auto after the first two iterates
    double prev_re = re;
    trace.status = OuterStatus::MaxIterations;

    for (int k = 1; k < config.k_max; ++k) {
        // Newton step from the converged triple; bisection fallback when the
        // step leaves the bracket or the derivative degenerates.
        double next = std::numeric_limits<double>::quiet_NaN();
        bool newton_ok = true;
        try {
            const double deriv = delta_mode ? phi_derivative(inner.state.triple, s)
                                            : psi_derivative(inner.state.triple);
            next = param + re / deriv;
        } catch (const ZeroStructuredGradient&) {
            newton_ok = false;
        }
        if (!delta_mode && !(next > 0.0)) newton_ok = false; // eps must stay positive
        if (!newton_ok || !std::isfinite(next) || !bracket.contains(next)) {
            if (std::isfinite(bracket.ub)) {
                next = 0.5 * (bracket.lb + bracket.ub);
            } else {
                // no sign change seen yet: grow geometrically
                next = std::max(2.0 * param, param + std::max(1e-2, param));
            }
        } else if (tol > 0.0) {
            tol = std::max(1e-2 * tol, config.tol_floor);
        }

        inner = run_inner(next, inner.state);
        re = inner.re_lambda;
        trace.rows.push_back({k + 1, next, re, inner.steps});
        if (!inner.converged)
            trace.warnings.push_back("inner iteration " + std::to_string(k + 1) +
                                     " did not reach the stationarity tolerance");
        bracket.update(next, re);
        param = next;

        if (tol <= 0.0) tol = std::max(std::abs(re - prev_re) / 10.0, config.tol_floor);
        if (std::abs(re - prev_re) < tol) {
            trace.status = OuterStatus::Converged;
            break;
        }
        prev_re = re;
    }

    trace.final_value = param;
    trace.lb = bracket.lb;
    trace.ub = bracket.ub;
    trace.extremal = inner.state;
    if (delta_mode) {
        trace.eps = config.eps;
        trace.delta = param;
    } else {
        trace.eps = param;
        trace.delta = config.delta;
    }
    return trace;
}

OuterTrace stability_radius_trace(const ComplexMatrix& a, const StabilityRadiusOptions& opts) {
    OuterConfig config;
    config.mode = OuterMode::SolveEps;
    config.delta = 0.0;
    config.tol_floor = opts.tol_floor;
    config.k_max = opts.k_max;
    config.inner = opts.inner;
    // eps* <= |Re lambda_max(A)|, so half of it is a safe starting scale
    config.param0 = 0.5 * std::abs(spectral_abscissa(a));
    const StructureSpace s = StructureSpace::full_complex(a.rows());
    return solve_radius(a, s, config);
}

double stability_radius(const ComplexMatrix& a, const StabilityRadiusOptions& opts) {
    return stability_radius_trace(a, opts).final_value;
}

} // namespace stabrad
