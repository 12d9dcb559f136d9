#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "stabrad/matrix.hpp"

namespace stabrad {

/// Seedable random source used by all sampling routines.
///
/// The generator is std::mt19937_64 (fully specified by the C++ standard,
/// so bit-identical across platforms). Uniform and gaussian variates are
/// derived by hand instead of through std::*_distribution, whose output is
/// implementation-defined; this keeps sampled clouds reproducible anywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Complex complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return Complex(re, im);
    }

    ComplexMatrix gaussian_matrix(int rows, int cols) {
        ComplexMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = complex_gaussian();
        return m;
    }

    ComplexMatrix gaussian_real_matrix(int rows, int cols) {
        ComplexMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = Complex(gaussian(), 0.0);
        return m;
    }

    ComplexVector gaussian_vector(int n) {
        ComplexVector v(n);
        for (Complex& z : v) z = complex_gaussian();
        return v;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace stabrad
