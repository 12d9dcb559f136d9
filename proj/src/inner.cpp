#include "stabrad/inner.hpp"

#include <algorithm>
#include <cmath>

#include "stabrad/errors.hpp"
#include "stabrad/rng.hpp"

namespace stabrad {
namespace {

constexpr double kZeroStructuredTol = 1e-14;

ComplexMatrix perturbed_matrix(const ComplexMatrix& a, double eps, double delta,
                               const RankOneState& st) {
    ComplexMatrix m = a + eps * outer_product(st.u, st.v);
    if (delta > 0.0) m += (st.sign * delta * st.eta) * st.structured;
    return m;
}

bool real_rightmost(const ComplexMatrix& a, const EigenTriple& t) {
    return a.is_real(0.0) &&
           std::abs(t.lambda.imag()) <= 1e-12 * (1.0 + std::abs(t.lambda.real()));
}

// Builds a consistent state like make_state, optionally refining the hinted
// eigentriple instead of running the dense solve.
RankOneState build_state(const ComplexMatrix& a, const StructureSpace& s, double eps,
                         double delta, ComplexVector u, ComplexVector v, int sign,
                         const EigenTriple* hint) {
    if (!a.is_square()) throw DimensionMismatch("make_state: matrix must be square");
    if (static_cast<int>(u.size()) != a.rows() || static_cast<int>(v.size()) != a.rows())
        throw DimensionMismatch("make_state: vector size mismatch");
    RankOneState st;
    st.u = normalized(std::move(u));
    st.v = normalized(std::move(v));
    st.sign = sign;
    if (delta > 0.0) {
        st.structured = s.project(outer_product(st.u, st.v));
        const double npe = frobenius_norm(st.structured);
        if (npe < kZeroStructuredTol)
            throw ZeroStructuredPart("Pi^S(u v*) vanishes; structured term undefined");
        st.eta = 1.0 / npe;
    }
    const ComplexMatrix m = perturbed_matrix(a, eps, delta, st);
    if (hint) {
        if (std::optional<EigenTriple> t = refine_eigentriple(m, *hint, &st.u)) {
            st.triple = std::move(*t);
            return st;
        }
    }
    st.triple = rightmost_eigentriple(m, &st.u);
    return st;
}

RankOneState apply_splitting_step(const ComplexMatrix& a, const StructureSpace& s, double eps,
                                  double delta, const RankOneState& st,
                                  const GradientPair& grad, double h,
                                  bool track_eigentriple = false) {
    const double re_gamma = grad.gamma.real();
    const ComplexVector gv = matvec(grad.Gtilde, st.v);
    const ComplexVector gu = adjoint_matvec(grad.Gtilde, st.u);

    ComplexVector u_hat = st.u;
    ComplexVector v_hat = st.v;
    for (size_t i = 0; i < u_hat.size(); ++i) u_hat[i] += h * (re_gamma * st.u[i] - gv[i]);
    for (size_t i = 0; i < v_hat.size(); ++i) v_hat[i] += h * (re_gamma * st.v[i] - gu[i]);

    ComplexVector u_new = normalized(std::move(u_hat));
    ComplexVector v_new = normalized(std::move(v_hat));

    // Rotation step, solved exactly with the pre-step gradient. For a real
    // matrix with real rightmost eigenvalue the right-hand side vanishes.
    if (!real_rightmost(a, st.triple)) {
        const Complex gamma_check = vdot(u_new, matvec(grad.Gtilde, v_new));
        const double theta = 0.5 * gamma_check.imag();
        const Complex ru = std::polar(1.0, theta * h);
        vscale(u_new, ru);
        vscale(v_new, std::conj(ru));
    }
    return build_state(a, s, eps, delta, std::move(u_new), std::move(v_new), st.sign,
                       track_eigentriple ? &st.triple : nullptr);
}

// Gv = 0 and u*G = 0 simultaneously (G = -xy*): the eigenvalue no longer
// responds to the rank-1 direction at all.
bool degenerate_direction(const GradientPair& grad, const RankOneState& st) {
    const double gv = vnorm(matvec(grad.G, st.v));
    const double ug = vnorm(adjoint_matvec(grad.G, st.u));
    return gv < 1e-12 && ug < 1e-12;
}

// One trajectory of the discrete splitting method with monotone step control.
InnerResult run_trajectory(const ComplexMatrix& a, const StructureSpace& s, double eps,
                           double delta, const InnerOptions& opts, ComplexVector u0,
                           ComplexVector v0, int sign) {
    const bool tracking =
        opts.eig_solve == EigSolve::Tracked ||
        (opts.eig_solve == EigSolve::Auto && a.rows() >= opts.tracked_threshold);
    const int verify_every = std::max(2, opts.verify_every);

    InnerResult res;
    res.state = make_state(a, s, eps, delta, std::move(u0), std::move(v0), sign);
    int evals = 1;
    double h = opts.h0;
    double re = res.state.triple.lambda.real();
    res.decay_history.push_back({evals, re, 0.0});

    auto record_norms = [&]() {
        const double du = std::abs(vnorm(res.state.u) - 1.0);
        const double dv = std::abs(vnorm(res.state.v) - 1.0);
        res.max_norm_err = std::max({res.max_norm_err, du, dv});
    };
    record_norms();

    const double tol_stat = opts.stat_tol_factor * eps;
    GradientPair grad = reduced_gradient(s, eps, delta, res.state);
    double stat = stationarity_residual(grad, res.state);
    double best_stat = stat;
    RankOneState best_state = res.state;
    double best_re = re;
    int plateau = 0;
    int accept_streak = 0;
    int no_progress = 0;

    while (evals < opts.max_steps) {
        if (degenerate_direction(grad, res.state)) {
            res.degenerate = true;
            break;
        }
        if (stat <= tol_stat && plateau >= opts.patience) break;
        // numerical floor: residual stopped improving, functional no longer moves
        if (no_progress >= 200 && plateau >= opts.patience) break;

        RankOneState trial = apply_splitting_step(a, s, eps, delta, res.state, grad, h,
                                                  tracking && evals % verify_every != 0);
        ++evals;
        const double re_trial = trial.triple.lambda.real();
        const double change = re_trial - re;
        if (std::abs(change) < std::max(opts.tol_inner, 4e-16 * (1.0 + std::abs(re))))
            ++plateau;
        else
            plateau = 0;

        // Monotone acceptance with slack at the eigensolver noise level, so
        // the iteration keeps contracting instead of freezing once Re(lambda)
        // changes drop to roundoff.
        const double noise = 1e-14 * (1.0 + std::abs(re));
        if (re_trial >= re - noise) {
            res.state = std::move(trial);
            re = re_trial;
            res.decay_history.push_back({evals, re, h});
            record_norms();
            ++accept_streak;
            grad = reduced_gradient(s, eps, delta, res.state);
            stat = stationarity_residual(grad, res.state);
            if (stat > 1.5 * best_stat && plateau > 0) {
                // functional flat but residual growing: the step size sits
                // outside the stability region of a weakly damped mode
                h = std::max(h / opts.backtrack, opts.h_min);
                accept_streak = 0;
            } else if (accept_streak >= 2) {
                h = std::min(h * opts.growth, opts.h_max);
            }
        } else {
            accept_streak = 0;
            h = std::max(h / opts.backtrack, opts.h_min);
        }
        if (stat < best_stat) {
            best_stat = stat;
            best_state = res.state;
            best_re = re;
            no_progress = 0;
        } else {
            ++no_progress;
        }
    }

    // hand back the most stationary iterate seen, not a later drifted one
    if (stat > best_stat) {
        res.state = std::move(best_state);
        re = best_re;
        stat = best_stat;
    }

    res.re_lambda = re;
    res.steps = evals;
    res.stationarity = stat;
    res.converged = !res.degenerate && stat <= tol_stat;
    return res;
}

} // namespace

RankOneState make_state(const ComplexMatrix& a, const StructureSpace& s, double eps,
                        double delta, ComplexVector u, ComplexVector v, int sign) {
    return build_state(a, s, eps, delta, std::move(u), std::move(v), sign, nullptr);
}

double functional(const ComplexMatrix& a, const StructureSpace& s, double eps, double delta,
                  const RankOneState& state) {
    RankOneState st = make_state(a, s, eps, delta, state.u, state.v, state.sign);
    return -st.triple.lambda.real();
}

double reduced_functional(const ComplexMatrix& a, const StructureSpace& s, double eps,
                          double delta, const ComplexMatrix& e, int sign) {
    ComplexMatrix m = a + eps * e;
    if (delta > 0.0) {
        ComplexMatrix pe = s.project(e);
        const double npe = frobenius_norm(pe);
        if (npe < kZeroStructuredTol)
            throw ZeroStructuredPart("Pi^S(E) vanishes; structured term undefined");
        m += (sign * delta / npe) * pe;
    }
    return -rightmost_eigentriple(m).lambda.real();
}

GradientPair reduced_gradient(const StructureSpace& s, double eps, double delta,
                              const RankOneState& state) {
    GradientPair g;
    g.G = Complex(-1.0, 0.0) * outer_product(state.triple.x, state.triple.y);
    if (delta > 0.0) {
        if (state.eta <= 0.0)
            throw ZeroStructuredPart("state has no structured part but delta > 0");
        const double se = state.sign * delta * state.eta;
        const ComplexMatrix pg = s.project(g.G);
        const double c = state.eta * frobenius_inner(g.G, state.structured).real();
        g.Gtilde = eps * g.G;
        g.Gtilde += se * pg;
        g.Gtilde -= (se * c * state.eta) * state.structured;
    } else {
        g.Gtilde = eps * g.G;
    }
    g.gamma = vdot(state.u, matvec(g.Gtilde, state.v));
    return g;
}

double stationarity_residual(const GradientPair& grad, const RankOneState& state) {
    const ComplexMatrix e = outer_product(state.u, state.v);
    const double rho = frobenius_inner(grad.Gtilde, e).real();
    return frobenius_norm(grad.Gtilde - rho * e);
}

RankOneState splitting_step(const ComplexMatrix& a, const StructureSpace& s, double eps,
                            double delta, const RankOneState& state, double h) {
    const GradientPair grad = reduced_gradient(s, eps, delta, state);
    return apply_splitting_step(a, s, eps, delta, state, grad, h);
}

std::pair<ComplexMatrix, ComplexMatrix> full_flow_step(const ComplexMatrix& a,
                                                       const StructureSpace& s, double eps,
                                                       double delta, const ComplexMatrix& e,
                                                       const ComplexMatrix& es, double h) {
    ComplexMatrix m = a + eps * e;
    if (delta > 0.0) m += delta * es;
    const EigenTriple t = rightmost_eigentriple(m);
    const ComplexMatrix g = Complex(-1.0, 0.0) * outer_product(t.x, t.y);

    ComplexMatrix e_new = e;
    {
        const double c = frobenius_inner(g, e).real();
        e_new += (h / eps) * (c * e - g);
        const double n = frobenius_norm(e_new);
        if (n < 1e-300) throw SolverError("full flow step collapsed E to zero");
        e_new *= Complex(1.0 / n, 0.0);
    }
    ComplexMatrix es_new = es;
    if (delta > 0.0) {
        const ComplexMatrix pg = s.project(g);
        const double c = frobenius_inner(pg, es).real();
        es_new += (h / delta) * (c * es - pg);
        const double n = frobenius_norm(es_new);
        if (n < 1e-300) throw ZeroStructuredPart("full flow step collapsed E^S to zero");
        es_new *= Complex(1.0 / n, 0.0);
    }
    return {std::move(e_new), std::move(es_new)};
}

InnerResult solve_inner(const ComplexMatrix& a, const StructureSpace& s, double eps,
                        double delta, const std::optional<RankOneState>& init,
                        const InnerOptions& opts) {
    if (eps <= 0.0) throw SolverError("solve_inner requires eps > 0");
    if (delta < 0.0) throw SolverError("solve_inner requires delta >= 0");
    if (!a.is_finite()) throw NonFiniteInput("solve_inner: non-finite matrix");

    Rng rng(opts.seed);
    std::vector<std::pair<ComplexVector, ComplexVector>> starts;
    if (init) {
        starts.emplace_back(init->u, init->v);
    } else {
        const EigenTriple t0 = rightmost_eigentriple(a);
        starts.emplace_back(t0.x, t0.y); // E(0) = x y*
    }
    for (int r = 1; r < opts.restarts; ++r)
        starts.emplace_back(normalized(rng.gaussian_vector(a.rows())),
                            normalized(rng.gaussian_vector(a.rows())));

    std::vector<int> signs = {init ? init->sign : +1};
    if (opts.try_both_signs && delta > 0.0 && signs[0] == +1) signs.push_back(-1);

    std::optional<InnerResult> best;
    std::optional<ZeroStructuredPart> last_error;
    for (const auto& [u0, v0] : starts) {
        for (int sign : signs) {
            try {
                InnerResult r = run_trajectory(a, s, eps, delta, opts, u0, v0, sign);
                const bool better =
                    !best || (r.converged && !best->converged) ||
                    (r.converged == best->converged && r.re_lambda > best->re_lambda);
                if (better) best = std::move(r);
            } catch (const ZeroStructuredPart& err) {
                last_error = err;
            }
        }
    }
    if (!best) {
        if (init) {
            // the warm start hit a vanishing structured projection; retry
            // from the standard initial value and a few random directions
            InnerOptions fallback = opts;
            fallback.restarts = std::max(opts.restarts, 3);
            return solve_inner(a, s, eps, delta, std::nullopt, fallback);
        }
        if (last_error) throw *last_error;
        throw SolverError("solve_inner produced no trajectory");
    }
    return *best;
}

InnerResult solve_inner_full(const ComplexMatrix& a, const StructureSpace& s, double eps,
                             double delta, const InnerOptions& opts) {
    if (eps <= 0.0) throw SolverError("solve_inner_full requires eps > 0");
    const EigenTriple t0 = rightmost_eigentriple(a);
    ComplexMatrix e = outer_product(t0.x, t0.y);
    ComplexMatrix es(a.rows(), a.rows());
    if (delta > 0.0) {
        es = s.project(e);
        const double n = frobenius_norm(es);
        if (n < kZeroStructuredTol)
            throw ZeroStructuredPart("Pi^S(x y*) vanishes at the initial value");
        es *= Complex(1.0 / n, 0.0);
    }

    auto evaluate = [&](const ComplexMatrix& ee, const ComplexMatrix& ss) {
        ComplexMatrix m = a + eps * ee;
        if (delta > 0.0) m += delta * ss;
        return rightmost_eigentriple(m);
    };
    auto residual = [&](const EigenTriple& tt, const ComplexMatrix& ee,
                        const ComplexMatrix& ss) {
        const ComplexMatrix g = Complex(-1.0, 0.0) * outer_product(tt.x, tt.y);
        double r = frobenius_norm(g - frobenius_inner(g, ee).real() * ee);
        if (delta > 0.0) {
            const ComplexMatrix pg = s.project(g);
            r += frobenius_norm(pg - frobenius_inner(pg, ss).real() * ss);
        }
        return r;
    };

    InnerResult res;
    EigenTriple t = evaluate(e, es);
    int evals = 1;
    double re = t.lambda.real();
    res.decay_history.push_back({evals, re, 0.0});
    double h = opts.h0;
    int plateau = 0;
    int accept_streak = 0;
    int no_progress = 0;

    const double tol_stat = opts.stat_tol_factor * std::max(1.0, eps);
    double stat = residual(t, e, es);
    double best_stat = stat;
    ComplexMatrix best_e = e, best_es = es;
    EigenTriple best_t = t;
    double best_re = re;
    while (evals < opts.max_steps) {
        if (stat <= tol_stat && plateau >= opts.patience) break;
        if (no_progress >= 200 && plateau >= opts.patience) break;
        auto [e_trial, es_trial] = full_flow_step(a, s, eps, delta, e, es, h);
        EigenTriple t_trial = evaluate(e_trial, es_trial);
        ++evals;
        const double re_trial = t_trial.lambda.real();
        if (std::abs(re_trial - re) < std::max(opts.tol_inner, 4e-16 * (1.0 + std::abs(re))))
            ++plateau;
        else
            plateau = 0;
        const double noise = 1e-14 * (1.0 + std::abs(re));
        if (re_trial >= re - noise) {
            e = std::move(e_trial);
            es = std::move(es_trial);
            t = std::move(t_trial);
            re = re_trial;
            res.decay_history.push_back({evals, re, h});
            ++accept_streak;
            stat = residual(t, e, es);
            if (stat > 1.5 * best_stat && plateau > 0) {
                h = std::max(h / opts.backtrack, opts.h_min);
                accept_streak = 0;
            } else if (accept_streak >= 2) {
                h = std::min(h * opts.growth, opts.h_max);
            }
        } else {
            accept_streak = 0;
            h = std::max(h / opts.backtrack, opts.h_min);
        }
        if (stat < best_stat) {
            best_stat = stat;
            best_e = e;
            best_es = es;
            best_t = t;
            best_re = re;
            no_progress = 0;
        } else {
            ++no_progress;
        }
    }
    if (stat > best_stat) {
        e = std::move(best_e);
        es = std::move(best_es);
        t = std::move(best_t);
        re = best_re;
        stat = best_stat;
    }

    // Dominant singular pair of the stationary E gives the rank-1 factors.
    ComplexVector v = t.y;
    for (int it = 0; it < 100; ++it) v = normalized(adjoint_matvec(e, matvec(e, v)));
    ComplexVector u = normalized(matvec(e, v));

    res.state = make_state(a, s, eps, delta, std::move(u), std::move(v), +1);
    res.re_lambda = re;
    res.steps = evals;
    res.stationarity = stat;
    res.converged = stat <= tol_stat;
    return res;
}

} // namespace stabrad
