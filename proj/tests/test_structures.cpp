#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stabrad/errors.hpp"
#include "stabrad/io.hpp"
#include "stabrad/structures.hpp"

using namespace stabrad;

namespace {

std::vector<StructureSpace> all_kinds(int n, Rng& rng) {
    std::vector<IndexPair> pattern;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i == j || rng.uniform() < 0.4) pattern.emplace_back(i, j);
    return {
        StructureSpace::full_complex(n),
        StructureSpace::full_real(n),
        StructureSpace::sparsity_complex(n, pattern),
        StructureSpace::sparsity_real(n, pattern),
        StructureSpace::toeplitz_band_real(n, 1, std::min(2, n - 1)),
    };
}

} // namespace

TEST_CASE("projection examples") {
    ComplexMatrix z1(1, 1);
    z1(0, 0) = Complex(1.0, 2.0);
    CHECK(StructureSpace::full_real(1).project(z1)(0, 0) == Complex(1.0, 0.0));

    ComplexMatrix z2(2, 2);
    z2(0, 0) = Complex(1.0, 1.0);
    z2(0, 1) = 3.0;
    z2(1, 0) = 4.0;
    z2(1, 1) = 5.0;
    const StructureSpace mask = StructureSpace::sparsity_complex(2, {{0, 0}});
    const ComplexMatrix p = mask.project(z2);
    CHECK(p(0, 0) == Complex(1.0, 1.0));
    CHECK(p(0, 1) == Complex(0.0, 0.0));
    CHECK(p(1, 0) == Complex(0.0, 0.0));
    CHECK(p(1, 1) == Complex(0.0, 0.0));
}

TEST_CASE("Toeplitz projection takes per-diagonal means of real parts") {
    const StructureSpace s = StructureSpace::toeplitz_band_real(3, 1, 1);
    ComplexMatrix z(3, 3);
    z(0, 0) = Complex(1.0, 1.0);
    z(1, 1) = 3.0;
    z(2, 2) = 5.0;
    const ComplexMatrix p = s.project(z);
    CHECK(p(0, 0) == Complex(3.0, 0.0));
    CHECK(p(1, 1) == Complex(3.0, 0.0));
    CHECK(p(2, 2) == Complex(3.0, 0.0));
    // against the normal-equations oracle
    const ComplexMatrix ref = oracle::least_squares_projection(s, z);
    CHECK(frobenius_norm(p - ref) < 1e-12);
}

TEST_CASE("membership residual") {
    const StructureSpace real2 = StructureSpace::full_real(2);
    ComplexMatrix z(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -4.0;
    CHECK(real2.membership_residual(z) == doctest::Approx(0.0));

    ComplexMatrix zi(1, 1);
    zi(0, 0) = Complex(0.0, 1.0);
    CHECK(StructureSpace::full_real(1).membership_residual(zi) == doctest::Approx(1.0));

    // the shifted Grcar matrix lies in its own Toeplitz band space
    const ComplexMatrix a = grcar(10, 1.0);
    const StructureSpace t13 = StructureSpace::toeplitz_band_real(10, 1, 3);
    CHECK(t13.membership_residual(a) < 1e-13);
}

TEST_CASE("projection properties over random matrices, all kinds") {
    Rng rng(101);
    for (int n : {3, 4, 6}) {
        for (const StructureSpace& s : all_kinds(n, rng)) {
            CAPTURE(s.description());
            for (int trial = 0; trial < 6; ++trial) {
                const ComplexMatrix z = rng.gaussian_matrix(n, n);
                const ComplexMatrix w = rng.gaussian_matrix(n, n);
                const ComplexMatrix pz = s.project(z);
                const ComplexMatrix pw = s.project(w);
                // idempotence
                CHECK(frobenius_norm(s.project(pz) - pz) < 1e-12);
                // membership of the image
                CHECK(s.membership_residual(pz) < 1e-12);
                // self-adjointness for the real pairing
                CHECK(frobenius_inner(pz, w).real() ==
                      doctest::Approx(frobenius_inner(z, pw).real()).epsilon(1e-12));
                // characterizing property: Re<Pi Z, W> = Re<Z, W> for W in S
                CHECK(frobenius_inner(pz, pw).real() ==
                      doctest::Approx(frobenius_inner(z, pw).real()).epsilon(1e-12));
                // contraction
                CHECK(frobenius_norm(pz) <= frobenius_norm(z) + 1e-14);
                // Pythagoras
                const double nz = frobenius_norm(z);
                const double np = frobenius_norm(pz);
                const double nr = frobenius_norm(z - pz);
                CHECK(nz * nz == doctest::Approx(np * np + nr * nr).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("brute-force least-squares equivalence at small n") {
    Rng rng(103);
    for (int n : {2, 3, 4}) {
        for (const StructureSpace& s : all_kinds(n, rng)) {
            CAPTURE(s.description());
            for (int trial = 0; trial < 4; ++trial) {
                const ComplexMatrix z = rng.gaussian_matrix(n, n);
                const ComplexMatrix mine = s.project(z);
                const ComplexMatrix ref = oracle::least_squares_projection(s, z);
                CHECK(frobenius_norm(mine - ref) < 1e-10);
            }
        }
    }
}

TEST_CASE("generic basis structure agrees with its named counterpart") {
    Rng rng(107);
    const int n = 3;
    const StructureSpace named = StructureSpace::toeplitz_band_real(n, 1, 1);
    const StructureSpace generic = StructureSpace::from_basis(n, oracle::structure_basis(named));
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix z = rng.gaussian_matrix(n, n);
        CHECK(frobenius_norm(named.project(z) - generic.project(z)) < 1e-12);
    }
}

TEST_CASE("pattern validation") {
    CHECK_THROWS_AS(StructureSpace::sparsity_real(2, {{0, 0}, {0, 0}}), DimensionMismatch);
    CHECK_THROWS_AS(StructureSpace::sparsity_real(2, {{2, 0}}), DimensionMismatch);
    CHECK_THROWS_AS(StructureSpace::toeplitz_band_real(3, 3, 0), DimensionMismatch);
    const StructureSpace s = StructureSpace::full_real(2);
    CHECK_THROWS_AS(s.project(ComplexMatrix(3, 3)), DimensionMismatch);
}

TEST_CASE("real dimensions") {
    Rng rng(109);
    const int n = 4;
    CHECK(StructureSpace::full_complex(n).real_dimension() == 2 * n * n);
    CHECK(StructureSpace::full_real(n).real_dimension() == n * n);
    CHECK(StructureSpace::toeplitz_band_real(n, 1, 2).real_dimension() == 4);
    const StructureSpace sp = StructureSpace::sparsity_complex(n, {{0, 1}, {2, 3}});
    CHECK(sp.real_dimension() == 4);
}
