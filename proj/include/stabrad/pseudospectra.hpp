#pragma once

#include <cstdint>
#include <vector>

#include "stabrad/linalg.hpp"
#include "stabrad/matrix.hpp"
#include "stabrad/structures.hpp"

namespace stabrad {

struct GridSpec {
    double re_min, re_max;
    double im_min, im_max;
    int nx, ny;

    void validate() const;
    double re_at(int ix) const { return re_min + (re_max - re_min) * ix / (nx - 1); }
    double im_at(int iy) const { return im_min + (im_max - im_min) * iy / (ny - 1); }
    Complex node(int ix, int iy) const { return {re_at(ix), im_at(iy)}; }
};

/// sigma_min(A - lambda I) sampled over a grid; the eps level set of the
/// field is the boundary of the eps-pseudospectrum.
struct ResolventField {
    GridSpec grid;
    std::vector<double> values; // indexed ix * ny + iy

    double at(int ix, int iy) const { return values[static_cast<size_t>(ix) * grid.ny + iy]; }
};

/// Evaluates the field at every node; nodes are independent and run on the
/// worker pool.
ResolventField resolvent_field(const ComplexMatrix& a, const GridSpec& grid);

/// Window that encloses the spectrum with the given margin, suitable as a
/// default plot window.
GridSpec default_grid(const ComplexMatrix& a, double margin, int nx, int ny);

struct AxisSweepResult {
    double omega;        // arg min of sigma_min(A - i*omega I)
    double sigma;        // the minimum value; equals eps*(A) for Hurwitz A
};

/// Minimizes sigma_min(A - i*omega I) over a uniform grid on
/// [omega_lo, omega_hi], then refines by golden-section search around the
/// best node.
AxisSweepResult axis_sweep(const ComplexMatrix& a, double omega_lo, double omega_hi,
                           int n_points);

/// axis_sweep over the symmetric window |omega| <= 2 ||A||_F.
AxisSweepResult axis_sweep_auto(const ComplexMatrix& a, int n_points);

struct EigenCloud {
    std::vector<Complex> eigenvalues;
    ComplexMatrix delta_sample; // the structured perturbation used
    ComplexMatrix theta_sample; // the unstructured perturbation used
};

/// Draws n_samples pairs (Delta, Theta) with Delta in S, ||Delta||_F <= delta
/// and ||Theta||_F <= eps (uniform direction; radius delta*u^(1/dim) unless
/// fixed_radius), and returns the spectra of A + Delta + Theta. Every point
/// of every cloud lies in the joint pseudospectrum.
std::vector<EigenCloud> joint_pseudospectrum_sample(const ComplexMatrix& a,
                                                    const StructureSpace& s, double eps,
                                                    double delta, int n_samples,
                                                    std::uint64_t rng_seed,
                                                    bool fixed_radius = false);

struct ContourPolyline {
    std::vector<Complex> points;
    bool closed = false;
};

/// Marching-squares extraction of the level set sigma_min = level,
/// interpolated on the log of the field. Open polylines end on the window
/// boundary.
std::vector<ContourPolyline> extract_level_set(const ResolventField& field, double level);

} // namespace stabrad
