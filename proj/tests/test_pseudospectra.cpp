#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stabrad/io.hpp"
#include "stabrad/outer.hpp"
#include "stabrad/pseudospectra.hpp"

using namespace stabrad;

TEST_CASE("field values are distances for normal matrices") {
    ComplexMatrix a(1, 1);
    a(0, 0) = -1.0;
    GridSpec g{-0.5, 0.5, -0.5, 0.5, 3, 3};
    const ResolventField f = resolvent_field(a, g);
    // node (1,1) is lambda = 0: sigma_min = |0 - (-1)| = 1
    CHECK(f.at(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

    ComplexMatrix d(3, 3);
    d(0, 0) = Complex(-1.0, 2.0);
    d(1, 1) = Complex(-3.0, -1.0);
    d(2, 2) = Complex(-2.0, 0.5);
    GridSpec g2{-4.0, 0.0, -2.0, 3.0, 9, 9};
    const ResolventField f2 = resolvent_field(d, g2);
    for (int ix = 0; ix < 9; ++ix)
        for (int iy = 0; iy < 9; ++iy) {
            const Complex l = g2.node(ix, iy);
            double dist = 1e300;
            for (int k = 0; k < 3; ++k) dist = std::min(dist, std::abs(l - d(k, k)));
            CHECK(f2.at(ix, iy) == doctest::Approx(dist).epsilon(1e-10));
        }
}

TEST_CASE("field symmetry for real matrices") {
    Rng rng(71);
    const ComplexMatrix a = rng.gaussian_real_matrix(5, 5);
    GridSpec g{-2.0, 2.0, -1.5, 1.5, 7, 7}; // symmetric about the real axis
    const ResolventField f = resolvent_field(a, g);
    for (int ix = 0; ix < 7; ++ix)
        for (int iy = 0; iy < 7; ++iy)
            CHECK(f.at(ix, iy) == doctest::Approx(f.at(ix, 6 - iy)).epsilon(1e-12));
}

TEST_CASE("rightmost extent of the eps level set is the pseudospectral abscissa") {
    const ComplexMatrix a = grcar(10, 1.0);
    // fine local window around the known touch point near Im = 2.1
    GridSpec g{-0.55, -0.25, 1.8, 2.5, 121, 121};
    const ResolventField f = resolvent_field(a, g);
    const std::vector<ContourPolyline> polys = extract_level_set(f, 0.5);
    REQUIRE(!polys.empty());
    double max_re = -1e300;
    for (const ContourPolyline& p : polys)
        for (const Complex& z : p.points) max_re = std::max(max_re, z.real());
    CHECK(max_re == doctest::Approx(-3.890782704837603e-1).epsilon(2e-4));
}

TEST_CASE("axis sweep on a normal matrix") {
    ComplexMatrix d(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = -2.0;
    const AxisSweepResult r = axis_sweep(d, -3.0, 3.0, 2001);
    // at a quadratic minimum, function comparisons localize omega only to
    // about sqrt(machine eps); sigma itself is exact
    CHECK(std::abs(r.omega) < 1e-6);
    CHECK(r.sigma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("axis sweep of a real matrix is symmetric in omega") {
    Rng rng(73);
    const ComplexMatrix a = oracle::random_stable_real(rng, 6, 0.4);
    const AxisSweepResult full = axis_sweep(a, -2.0 * frobenius_norm(a),
                                            2.0 * frobenius_norm(a), 4001);
    const AxisSweepResult half = axis_sweep(a, 0.0, 2.0 * frobenius_norm(a), 2001);
    CHECK(full.sigma == doctest::Approx(half.sigma).epsilon(1e-8));
}

TEST_CASE("Grcar stability radius from the sweep") {
    const ComplexMatrix a = grcar(10, 1.0);
    const AxisSweepResult r = axis_sweep_auto(a, 20000);
    CHECK(r.sigma == doctest::Approx(8.39282612e-1).epsilon(1e-7));
}

TEST_CASE("joint sampling with zero radii returns the spectrum") {
    ComplexMatrix a(3, 3);
    a(0, 0) = -1.0;
    a(1, 1) = Complex(-2.0, 1.0);
    a(2, 2) = -3.0;
    const StructureSpace s = StructureSpace::full_real(3);
    const std::vector<EigenCloud> clouds = joint_pseudospectrum_sample(a, s, 0.0, 0.0, 4, 42);
    REQUIRE(clouds.size() == 4);
    const std::vector<Complex> spectrum = all_eigenvalues(a);
    for (const EigenCloud& c : clouds) {
        REQUIRE(c.eigenvalues.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(c.eigenvalues[k] - spectrum[k]) < 1e-13);
    }
}

TEST_CASE("sampled clouds satisfy the resolvent containment") {
    Rng seed(79);
    const ComplexMatrix a = oracle::random_stable_real(seed, 5, 0.5);
    const StructureSpace s = StructureSpace::full_real(5);
    const double eps = 0.2, delta = 0.3;
    const std::vector<EigenCloud> clouds =
        joint_pseudospectrum_sample(a, s, eps, delta, 6, 2024);
    for (const EigenCloud& c : clouds) {
        CHECK(frobenius_norm(c.delta_sample) <= delta + 1e-12);
        CHECK(frobenius_norm(c.theta_sample) <= eps + 1e-12);
        CHECK(s.membership_residual(c.delta_sample) < 1e-12);
        for (const Complex& l : c.eigenvalues) {
            ComplexMatrix shifted = a + c.delta_sample;
            for (int i = 0; i < 5; ++i) shifted(i, i) -= l;
            CHECK(smallest_singular_value(shifted) <= eps + 1e-10);
        }
    }
}

TEST_CASE("sampling is reproducible for a fixed seed") {
    Rng mk(5);
    const ComplexMatrix a = oracle::random_stable_real(mk, 4, 0.5);
    const StructureSpace s = StructureSpace::full_real(4);
    const std::vector<EigenCloud> c1 = joint_pseudospectrum_sample(a, s, 0.3, 0.2, 5, 99);
    const std::vector<EigenCloud> c2 = joint_pseudospectrum_sample(a, s, 0.3, 0.2, 5, 99);
    REQUIRE(c1.size() == c2.size());
    for (size_t k = 0; k < c1.size(); ++k) {
        CHECK(frobenius_norm(c1[k].delta_sample - c2[k].delta_sample) == 0.0);
        for (size_t j = 0; j < c1[k].eigenvalues.size(); ++j)
            CHECK(c1[k].eigenvalues[j] == c2[k].eigenvalues[j]);
    }
}

TEST_CASE("no sampled point crosses the axis below the computed radius") {
    const ComplexMatrix a = grcar(10, 1.0);
    std::vector<IndexPair> pattern;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            if (a(i, j) != Complex(0.0)) pattern.emplace_back(i, j);
    const StructureSpace s = StructureSpace::sparsity_real(10, pattern);
    const double radius = 8.5228382298260e-1;
    const std::vector<EigenCloud> clouds =
        joint_pseudospectrum_sample(a, s, 0.5, 0.8 * radius, 40, 7);
    for (const EigenCloud& c : clouds)
        for (const Complex& l : c.eigenvalues) CHECK(l.real() <= 1e-10);
}

TEST_CASE("extremal pair pushes an eigenvalue onto the axis") {
    const ComplexMatrix a = grcar(10, 1.0);
    std::vector<IndexPair> pattern;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            if (a(i, j) != Complex(0.0)) pattern.emplace_back(i, j);
    const StructureSpace s = StructureSpace::sparsity_real(10, pattern);
    OuterConfig cfg;
    cfg.mode = OuterMode::SolveDelta;
    cfg.eps = 0.5;
    const OuterTrace tr = solve_radius(a, s, cfg);
    // A + Delta + eps*E with the solver's extremal pair: rightmost Re is 0
    ComplexMatrix m = a + (tr.final_value * tr.extremal.eta) * tr.extremal.structured;
    m += 0.5 * outer_product(tr.extremal.u, tr.extremal.v);
    const std::vector<Complex> eigs = all_eigenvalues(m);
    CHECK(std::abs(eigs.front().real()) < 1e-8);
}

TEST_CASE("monotone nesting of sublevel sets") {
    const ComplexMatrix a = grcar(10, 1.0);
    const GridSpec g = default_grid(a, 0.2, 24, 24);
    const ResolventField f = resolvent_field(a, g);
    const double eps1 = 0.3, eps2 = 0.6;
    for (double v : f.values)
        if (v < eps1) CHECK(v < eps2);
}

TEST_CASE("marching squares returns closed loops around isolated spectra") {
    ComplexMatrix a(1, 1);
    a(0, 0) = -3.0;
    GridSpec g{-5.0, -1.0, -2.0, 2.0, 101, 101};
    const ResolventField f = resolvent_field(a, g);
    const std::vector<ContourPolyline> polys = extract_level_set(f, 1.0);
    REQUIRE(polys.size() == 1);
    CHECK(polys[0].closed);
    // every point sits on the circle |z + 3| = 1, up to interpolation error
    for (const Complex& z : polys[0].points)
        CHECK(std::abs(std::abs(z + Complex(3.0, 0.0)) - 1.0) < 2e-3);
}

TEST_CASE("grid csv export shape") {
    ComplexMatrix a(1, 1);
    a(0, 0) = -1.0;
    GridSpec g{-1.0, 1.0, -1.0, 1.0, 3, 3};
    const ResolventField f = resolvent_field(a, g);
    std::ostringstream out;
    write_field_csv(out, f);
    const std::string csv = out.str();
    CHECK(csv.rfind("re,im,sigma_min\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10); // header + 9 nodes
}
