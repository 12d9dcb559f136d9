#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "stabrad/errors.hpp"
#include "stabrad/io.hpp"
#include "stabrad/rng.hpp"

using namespace stabrad;

TEST_CASE("coordinate real general") {
    std::istringstream in("%%MatrixMarket matrix coordinate real general\n"
                          "% a comment\n"
                          "2 2 2\n"
                          "1 1 -1.0\n"
                          "2 2 -2.0\n");
    const MatrixMarketData d = read_matrix_market(in);
    CHECK(d.matrix.rows() == 2);
    CHECK(d.matrix(0, 0) == Complex(-1.0, 0.0));
    CHECK(d.matrix(1, 1) == Complex(-2.0, 0.0));
    CHECK(d.matrix(0, 1) == Complex(0.0, 0.0));
    REQUIRE(d.pattern.size() == 2);
    CHECK(d.pattern[0] == IndexPair{0, 0});
    CHECK(d.pattern[1] == IndexPair{1, 1});
    CHECK_FALSE(d.complex_field);
}

TEST_CASE("symmetric storage expands to full") {
    std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n"
                          "3 3 4\n"
                          "1 1 2.0\n"
                          "2 1 -1.0\n"
                          "3 2 -1.0\n"
                          "3 3 2.0\n");
    const MatrixMarketData d = read_matrix_market(in);
    CHECK(d.matrix(0, 1) == Complex(-1.0, 0.0));
    CHECK(d.matrix(1, 0) == Complex(-1.0, 0.0));
    CHECK(d.matrix(1, 2) == Complex(-1.0, 0.0));
    CHECK(d.matrix(2, 1) == Complex(-1.0, 0.0));
    CHECK(d.pattern.size() == 6);
}

TEST_CASE("hermitian and skew-symmetric expansion") {
    std::istringstream in("%%MatrixMarket matrix coordinate complex hermitian\n"
                          "2 2 2\n"
                          "1 1 1.0 0.0\n"
                          "2 1 2.0 3.0\n");
    const MatrixMarketData d = read_matrix_market(in);
    CHECK(d.matrix(1, 0) == Complex(2.0, 3.0));
    CHECK(d.matrix(0, 1) == Complex(2.0, -3.0));

    std::istringstream skew("%%MatrixMarket matrix coordinate real skew-symmetric\n"
                            "2 2 1\n"
                            "2 1 5.0\n");
    const MatrixMarketData ds = read_matrix_market(skew);
    CHECK(ds.matrix(1, 0) == Complex(5.0, 0.0));
    CHECK(ds.matrix(0, 1) == Complex(-5.0, 0.0));
}

TEST_CASE("explicit zeros stay in the pattern") {
    std::istringstream in("%%MatrixMarket matrix coordinate real general\n"
                          "2 2 2\n"
                          "1 2 0.0\n"
                          "2 1 1.0\n");
    const MatrixMarketData d = read_matrix_market(in);
    REQUIRE(d.pattern.size() == 2);
    CHECK(d.pattern[0] == IndexPair{0, 1});
    CHECK(d.matrix(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("array format") {
    std::istringstream in("%%MatrixMarket matrix array real general\n"
                          "2 2\n"
                          "1\n2\n3\n4\n");
    const MatrixMarketData d = read_matrix_market(in);
    CHECK(d.matrix(0, 0) == Complex(1.0, 0.0));
    CHECK(d.matrix(1, 0) == Complex(2.0, 0.0));
    CHECK(d.matrix(0, 1) == Complex(3.0, 0.0));
    CHECK(d.matrix(1, 1) == Complex(4.0, 0.0));
}

TEST_CASE("parse errors carry line numbers") {
    std::istringstream bad_header("%%MatrixMarket vector coordinate real general\n");
    CHECK_THROWS_AS(read_matrix_market(bad_header), ParseError);

    std::istringstream bad_entry("%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 1\n"
                                 "1 x 3\n");
    try {
        read_matrix_market(bad_entry);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 3);
    }

    std::istringstream truncated("%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 2\n"
                                 "1 1 3\n");
    CHECK_THROWS_AS(read_matrix_market(truncated), ParseError);

    std::istringstream pattern_only("%%MatrixMarket matrix coordinate pattern general\n"
                                    "2 2 1\n"
                                    "1 1\n");
    CHECK_THROWS_AS(read_matrix_market(pattern_only), UnsupportedField);
}

TEST_CASE("write-read round trip preserves entries exactly") {
    Rng rng(211);
    for (bool complex_entries : {false, true}) {
        ComplexMatrix m =
            complex_entries ? rng.gaussian_matrix(4, 4) : rng.gaussian_real_matrix(4, 4);
        std::stringstream buf;
        write_matrix_market(buf, m);
        const MatrixMarketData d = read_matrix_market(buf);
        REQUIRE(d.matrix.rows() == 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                CHECK(d.matrix(i, j).real() == doctest::Approx(m(i, j).real()).epsilon(1e-16));
                CHECK(d.matrix(i, j).imag() == doctest::Approx(m(i, j).imag()).epsilon(1e-16));
            }
    }
}

TEST_CASE("grcar generator matches the displayed band") {
    const ComplexMatrix a = grcar(10, 1.0);
    CHECK(a(0, 0) == Complex(-2.0, 0.0));
    CHECK(a(1, 0) == Complex(1.0, 0.0));
    CHECK(a(0, 1) == Complex(-1.0, 0.0));
    CHECK(a(0, 2) == Complex(-1.0, 0.0));
    CHECK(a(0, 3) == Complex(-1.0, 0.0));
    CHECK(a(0, 4) == Complex(0.0, 0.0));
    // band: lower bandwidth 1, upper bandwidth 3
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const int d = j - i;
            if (d < -1 || d > 3) CHECK(a(i, j) == Complex(0.0, 0.0));
        }
    CHECK_THROWS_AS(grcar(4, 1.0), DimensionMismatch);
}

TEST_CASE("toeplitz_band generator") {
    const ComplexMatrix sub = toeplitz_band(3, 1, 3, {1.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(sub(1, 0) == Complex(1.0, 0.0));
    CHECK(sub(2, 1) == Complex(1.0, 0.0));
    CHECK(frobenius_norm(sub) == doctest::Approx(std::sqrt(2.0)));

    const ComplexMatrix scaled = toeplitz_band(4, 0, 0, {Complex(2.5, 0.0)});
    for (int i = 0; i < 4; ++i) CHECK(scaled(i, i) == Complex(2.5, 0.0));

    CHECK_THROWS_AS(toeplitz_band(3, 1, 1, {1.0}), DimensionMismatch);
}

TEST_CASE("toeplitz matrices project onto themselves") {
    const StructureSpace t13 = StructureSpace::toeplitz_band_real(6, 1, 3);
    const ComplexMatrix t = toeplitz_band(6, 1, 3, {0.3, -1.5, 2.0, 0.1, -0.7});
    CHECK(frobenius_norm(t13.project(t) - t) < 1e-13);
}

TEST_CASE("pattern list files") {
    const std::string path = "test_pattern_tmp.txt";
    {
        std::ofstream out(path);
        out << "% comment\n1 1\n2 3\n\n# another comment\n3 1\n";
    }
    const std::vector<IndexPair> pattern = read_pattern_file(path);
    std::remove(path.c_str());
    REQUIRE(pattern.size() == 3);
    CHECK(pattern[0] == IndexPair{0, 0});
    CHECK(pattern[1] == IndexPair{1, 2});
    CHECK(pattern[2] == IndexPair{2, 0});

    {
        std::ofstream out(path);
        out << "0 1\n";
    }
    CHECK_THROWS_AS(read_pattern_file(path), ParseError);
    std::remove(path.c_str());
}
