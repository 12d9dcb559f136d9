#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stabrad/bounds.hpp"
#include "stabrad/matrix.hpp"
#include "stabrad/outer.hpp"
#include "stabrad/pseudospectra.hpp"
#include "stabrad/structures.hpp"

namespace stabrad {

/// A parsed Matrix Market file: the dense matrix plus the stored coordinate
/// set (explicit zeros included), which serves as the natural sparsity
/// pattern of the file. Symmetric/hermitian/skew storage is expanded.
struct MatrixMarketData {
    ComplexMatrix matrix;
    std::vector<IndexPair> pattern; // 0-based, sorted
    bool complex_field = false;
};

MatrixMarketData read_matrix_market(std::istream& in);
MatrixMarketData read_matrix_market_file(const std::string& path);

/// Coordinate-format writer; emits the complex field iff some entry has a
/// nonzero imaginary part. Values are printed with 17 significant digits.
void write_matrix_market(std::ostream& out, const ComplexMatrix& m,
                         const std::string& comment = "");
void write_matrix_market_file(const std::string& path, const ComplexMatrix& m,
                              const std::string& comment = "");

/// Pattern list file: one "i j" pair per line, 1-based indices.
std::vector<IndexPair> read_pattern_file(const std::string& path);

/// The shifted Grcar test matrix -Grcar(n) - shift*I: subdiagonal +1, main
/// diagonal -1-shift, three superdiagonals -1. Requires n >= 5.
ComplexMatrix grcar(int n, double shift);

/// Banded Toeplitz matrix with diagonals -p..q; coefficients ordered by
/// increasing diagonal index.
ComplexMatrix toeplitz_band(int n, int p, int q, const std::vector<Complex>& coefficients);

/// 17-significant-digit decimal rendering used by all text exports.
std::string format_full(double v);

// -- report and grid serialization ------------------------------------------
// All exports are deterministic: no timestamps, numbers at full precision,
// JSON documents versioned with "schema": "stabrad/1".

/// Aligned text table with columns k, delta_k/eps_k, Re lambda_k, # steps.
std::string trace_table(const OuterTrace& trace);

std::string trace_json(const OuterTrace& trace);

std::string l2_report_json(const L2Report& report);

std::string contour_bound_json(const ContourBound& bound);

/// CSV "re,im,sigma_min", nodes in row-major (re outer, im inner) order.
void write_field_csv(std::ostream& out, const ResolventField& field);

/// CSV "level,segment_id,re,im".
void write_contours_csv(std::ostream& out, const std::vector<ContourPolyline>& contours,
                        double level);

/// CSV "sample_id,re,im".
void write_clouds_csv(std::ostream& out, const std::vector<EigenCloud>& clouds);

} // namespace stabrad
