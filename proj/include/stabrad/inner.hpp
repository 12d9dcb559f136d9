#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stabrad/linalg.hpp"
#include "stabrad/matrix.hpp"
#include "stabrad/structures.hpp"

namespace stabrad {

/// Rank-1 iterate of the inner eigenvalue optimization: the unstructured
/// direction E = u v* (u, v unit vectors) and everything derived from it.
/// The perturbed matrix is A + eps*uv* + sign*delta*eta*Pi^S(uv*) with
/// eta = 1/||Pi^S(uv*)||_F.
struct RankOneState {
    ComplexVector u;
    ComplexVector v;
    EigenTriple triple;       // eigentriple of the perturbed matrix
    ComplexMatrix structured; // Pi^S(u v*), empty when delta == 0
    double eta = 0.0;         // 1/||Pi^S(uv*)||_F, 0 when delta == 0
    int sign = +1;            // branch of the +-delta structured term
};

/// Free gradient G = -x y*, reduced gradient, and gamma = u* Gtilde v.
struct GradientPair {
    ComplexMatrix G;
    ComplexMatrix Gtilde;
    Complex gamma{};
};

/// Per-step eigentriple strategy. Dense always recomputes the full spectrum
/// (guaranteed rightmost); Tracked refines the previous triple by warm
/// inverse iteration and re-verifies densely every verify_every steps (much
/// cheaper for large matrices, tracks the eigenvalue branch in between);
/// Auto switches to Tracked above tracked_threshold.
enum class EigSolve { Auto, Dense, Tracked };

struct InnerOptions {
    double tol_inner = 1e-12;  // plateau threshold on per-step Re(lambda) changes
    int patience = 2;          // consecutive no-change trials required
    int max_steps = 5000;      // eigentriple evaluation budget
    double h0 = 0.1;
    double h_min = 1e-8;
    double h_max = 1.0;
    double backtrack = 2.0;    // step shrink factor on rejection
    double growth = 1.2;       // step growth after two consecutive acceptances
    double stat_tol_factor = 1e-8; // stationarity tolerance = factor * eps
    bool try_both_signs = false;
    int restarts = 1;          // total trajectories (extra ones start randomly)
    std::uint64_t seed = 0x5742AD;
    EigSolve eig_solve = EigSolve::Auto;
    int tracked_threshold = 256;
    int verify_every = 25;
};

struct DecayRecord {
    int step;         // eigentriple evaluations so far
    double re_lambda;
    double step_size;
};

struct InnerResult {
    RankOneState state;
    double re_lambda = 0.0;
    int steps = 0;      // eigentriple evaluations
    bool converged = false;
    double stationarity = 0.0;   // ||Gtilde - Re<Gtilde,E>E||_F at the end
    double max_norm_err = 0.0;   // max | ||u||-1 |, | ||v||-1 | over accepted steps
    bool degenerate = false;     // Gv = 0 and u*G = 0 hit simultaneously
    std::vector<DecayRecord> decay_history; // accepted steps only
};

/// Builds a consistent state at the given vectors: normalizes, projects,
/// and computes the eigentriple of the perturbed matrix with phase anchor u.
/// Throws ZeroStructuredPart when delta > 0 and ||Pi^S(uv*)||_F < 1e-14.
RankOneState make_state(const ComplexMatrix& a, const StructureSpace& s, double eps,
                        double delta, ComplexVector u, ComplexVector v, int sign = +1);

/// -Re lambda(A + eps*uv* + sign*delta*eta*Pi^S(uv*)), recomputing the
/// eigentriple from the state's vectors.
double functional(const ComplexMatrix& a, const StructureSpace& s, double eps, double delta,
                  const RankOneState& state);

/// Same functional evaluated at a general (not necessarily rank-1) matrix E.
double reduced_functional(const ComplexMatrix& a, const StructureSpace& s, double eps,
                          double delta, const ComplexMatrix& e, int sign = +1);

/// Assembles G = -xy* and the reduced gradient
///   Gtilde = eps*G + s*delta*eta*Pi^S(G)
///            - s*delta*eta * Re<G, eta*Pi^S(E)> * eta*Pi^S(E)
/// from the state's current eigentriple (s = state.sign).
GradientPair reduced_gradient(const StructureSpace& s, double eps, double delta,
                              const RankOneState& state);

/// ||Gtilde - Re<Gtilde, E> E||_F with E = u v*.
double stationarity_residual(const GradientPair& grad, const RankOneState& state);

/// One step of the splitting integrator: Euler step on the horizontal
/// vector dynamics, renormalization, then the exact phase rotation with
/// angle Im(gamma_check)/2 (skipped for a real matrix with real rightmost
/// eigenvalue). Refreshes the eigentriple with phase anchor = new u.
RankOneState splitting_step(const ComplexMatrix& a, const StructureSpace& s, double eps,
                            double delta, const RankOneState& state, double h);

/// One normalized Euler step of the full two-matrix gradient flow
///   eps*dE/dt  = -G + Re<G,E> E
///   delta*dES/dt = -Pi^S(G) + Re<Pi^S(G),ES> ES
/// followed by renormalization of both factors. Cross-check variant.
std::pair<ComplexMatrix, ComplexMatrix> full_flow_step(const ComplexMatrix& a,
                                                       const StructureSpace& s, double eps,
                                                       double delta, const ComplexMatrix& e,
                                                       const ComplexMatrix& es, double h);

/// Runs the splitting integrator with monotone (Armijo-type) step-size
/// control into a stationary point. Cold start is E(0) = x y* built from
/// the eigentriple of the unperturbed matrix; a warm start reuses the
/// vectors of a previous state.
InnerResult solve_inner(const ComplexMatrix& a, const StructureSpace& s, double eps,
                        double delta, const std::optional<RankOneState>& init,
                        const InnerOptions& opts);

/// Same contract as solve_inner but integrating the full two-matrix flow
/// with the normalized Euler method. The returned rank-1 state is the
/// dominant singular pair of the stationary E.
InnerResult solve_inner_full(const ComplexMatrix& a, const StructureSpace& s, double eps,
                             double delta, const InnerOptions& opts);

} // namespace stabrad
