#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stabrad/matrix.hpp"
#include "stabrad/pseudospectra.hpp"
#include "stabrad/structures.hpp"

namespace stabrad {

/// Transient bound ||e^{t(A+Delta)}||_2 <= |Gamma| / (2 pi eps), valid for
/// every structured Delta with ||Delta||_F <= delta <= delta_eps^S(A).
/// Gamma is the left-half-plane part of the (eps+delta)-pseudospectrum
/// boundary of A, closed by intervals on the imaginary axis.
struct ContourBound {
    double gamma_length = 0.0; // |Gamma|, all components combined
    double eps = 0.0;
    double bound = 0.0;                   // gamma_length / (2 pi eps)
    std::vector<Complex> contour;         // largest closed component, first == last
    int components = 0;                   // number of closed components
};

/// Extracts the (eps+delta)-level set from the field, clips it to
/// Re(lambda) <= 0, closes along the imaginary axis and measures its length.
/// Throws ContourEscapesWindow when the level set leaves the grid window and
/// OpenContour when clipping produces nothing measurable.
ContourBound contour_bound(const ComplexMatrix& a, double eps, double delta,
                           const ResolventField& field);

/// e^A by scaling and squaring with the degree-13 Pade approximant.
ComplexMatrix matrix_exponential(const ComplexMatrix& a);

struct Forcing {
    enum class Kind { PiecewiseConstantNoise, Harmonic, Custom };
    Kind kind = Kind::PiecewiseConstantNoise;
    int noise_segments = 64;  // piecewise-constant pieces over [0, T]
    double omega = 0.0;       // harmonic frequency: f(t) = e^{i omega t} w
    ComplexVector direction;  // harmonic direction w (defaults to e_1)
    /// Custom samples on a uniform grid over [0, T], linearly interpolated.
    std::vector<ComplexVector> samples;
};

struct L2Report {
    double eps = 0.0;
    double delta = 0.0;
    int n_samples = 0;
    double max_ratio = 0.0;     // max over samples of ||y||_L2 / ||f||_L2
    double bound = 0.0;         // 1 / eps
    std::vector<int> violations; // samples with ratio > bound * (1 + tol)
    std::vector<double> ratios;
    double tol_quad = 5e-3;
};

/// Samples structured perturbations with ||Delta||_F <= delta (plus the
/// supplied extremal one, if any), integrates y' = (A+Delta) y + f with
/// classical RK4 on n_steps uniform steps over [0, T], and compares the
/// trapezoidal L2 norms of y and f against the resolvent bound 1/eps.
/// Sampled certification, not a proof.
L2Report verify_l2_bound(const ComplexMatrix& a, const StructureSpace& s, double eps_used,
                         double delta, int n_perturbations, const Forcing& forcing, double T,
                         int n_steps, std::uint64_t rng_seed,
                         const ComplexMatrix* extremal = nullptr);

/// Integrates y' = M y + f(t), y(0) = 0 with classical RK4 and returns the
/// solution at the grid points t_k = k T / n_steps. Throws StepSizeUnstable
/// when the solution norm blows past 1e12 times the forcing scale.
std::vector<ComplexVector> integrate_forced_ode(const ComplexMatrix& m,
                                                const std::function<ComplexVector(double)>& f,
                                                double T, int n_steps);

/// Trapezoidal quadrature of ||g(t_k)||^2 over the uniform grid.
double l2_norm_trapezoid(const std::vector<ComplexVector>& samples, double T);

} // namespace stabrad
