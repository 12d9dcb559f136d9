#include "stabrad/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stabrad/errors.hpp"

namespace stabrad {
namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

enum class MmFormat { Coordinate, Array };
enum class MmField { Real, Complex, Integer, Pattern };
enum class MmSymmetry { General, Symmetric, SkewSymmetric, Hermitian };

struct MmHeader {
    MmFormat format;
    MmField field;
    MmSymmetry symmetry;
};

MmHeader parse_header(const std::string& line, long lineno) {
    std::istringstream ss(line);
    std::string banner, object, format, field, symmetry;
    ss >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw ParseError("missing %%MatrixMarket banner", lineno);
    if (lower(object) != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
    MmHeader h{};
    const std::string f = lower(format);
    if (f == "coordinate")
        h.format = MmFormat::Coordinate;
    else if (f == "array")
        h.format = MmFormat::Array;
    else
        throw ParseError("unsupported format '" + format + "'", lineno);
    const std::string fld = lower(field);
    if (fld == "real")
        h.field = MmField::Real;
    else if (fld == "complex")
        h.field = MmField::Complex;
    else if (fld == "integer")
        h.field = MmField::Integer;
    else if (fld == "pattern")
        h.field = MmField::Pattern;
    else
        throw ParseError("unsupported field '" + field + "'", lineno);
    const std::string sym = lower(symmetry);
    if (sym == "general")
        h.symmetry = MmSymmetry::General;
    else if (sym == "symmetric")
        h.symmetry = MmSymmetry::Symmetric;
    else if (sym == "skew-symmetric")
        h.symmetry = MmSymmetry::SkewSymmetric;
    else if (sym == "hermitian")
        h.symmetry = MmSymmetry::Hermitian;
    else
        throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
    return h;
}

bool next_content_line(std::istream& in, std::string& line, long& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '%') continue;
        return true;
    }
    return false;
}

void add_entry(ComplexMatrix& m, std::vector<IndexPair>& pattern, const MmHeader& h, int i,
               int j, Complex v, long lineno) {
    if (i < 0 || i >= m.rows() || j < 0 || j >= m.cols())
        throw ParseError("coordinate out of range", lineno);
    m(i, j) = v;
    pattern.emplace_back(i, j);
    if (i != j || h.symmetry == MmSymmetry::SkewSymmetric) {
        switch (h.symmetry) {
        case MmSymmetry::General:
            break;
        case MmSymmetry::Symmetric:
            m(j, i) = v;
            pattern.emplace_back(j, i);
            break;
        case MmSymmetry::SkewSymmetric:
            if (i == j) throw ParseError("skew-symmetric file stores a diagonal entry", lineno);
            m(j, i) = -v;
            pattern.emplace_back(j, i);
            break;
        case MmSymmetry::Hermitian:
            m(j, i) = std::conj(v);
            pattern.emplace_back(j, i);
            break;
        }
    }
}

} // namespace

MatrixMarketData read_matrix_market(std::istream& in) {
    long lineno = 0;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty stream", 1);
    ++lineno;
    const MmHeader h = parse_header(line, lineno);
    if (h.field == MmField::Pattern)
        throw UnsupportedField("pattern-only Matrix Market file: values are required here");

    if (!next_content_line(in, line, lineno)) throw ParseError("missing size line", lineno);
    std::istringstream size_line(line);

    MatrixMarketData out;
    out.complex_field = (h.field == MmField::Complex);

    if (h.format == MmFormat::Coordinate) {
        long rows = 0, cols = 0, nnz = 0;
        if (!(size_line >> rows >> cols >> nnz))
            throw ParseError("malformed coordinate size line", lineno);
        if (rows <= 0 || cols <= 0 || nnz < 0) throw ParseError("invalid dimensions", lineno);
        out.matrix = ComplexMatrix(static_cast<int>(rows), static_cast<int>(cols));
        for (long k = 0; k < nnz; ++k) {
            if (!next_content_line(in, line, lineno))
                throw ParseError("fewer entries than declared", lineno);
            std::istringstream es(line);
            long i = 0, j = 0;
            double re = 0.0, im = 0.0;
            if (!(es >> i >> j >> re)) throw ParseError("malformed entry", lineno);
            if (h.field == MmField::Complex && !(es >> im))
                throw ParseError("complex entry missing imaginary part", lineno);
            add_entry(out.matrix, out.pattern, h, static_cast<int>(i - 1),
                      static_cast<int>(j - 1), Complex(re, im), lineno);
        }
        if (next_content_line(in, line, lineno))
            throw ParseError("more entries than declared", lineno);
    } else {
        long rows = 0, cols = 0;
        if (!(size_line >> rows >> cols)) throw ParseError("malformed array size line", lineno);
        if (rows <= 0 || cols <= 0) throw ParseError("invalid dimensions", lineno);
        out.matrix = ComplexMatrix(static_cast<int>(rows), static_cast<int>(cols));
        // Array format stores columns; symmetric variants store the lower
        // triangle per column.
        for (int j = 0; j < cols; ++j) {
            const int i0 = (h.symmetry == MmSymmetry::General)          ? 0
                           : (h.symmetry == MmSymmetry::SkewSymmetric) ? j + 1
                                                                        : j;
            for (int i = i0; i < rows; ++i) {
                if (!next_content_line(in, line, lineno))
                    throw ParseError("fewer values than declared", lineno);
                std::istringstream es(line);
                double re = 0.0, im = 0.0;
                if (!(es >> re)) throw ParseError("malformed value", lineno);
                if (h.field == MmField::Complex && !(es >> im))
                    throw ParseError("complex value missing imaginary part", lineno);
                add_entry(out.matrix, out.pattern, h, i, j, Complex(re, im), lineno);
            }
        }
    }

    std::sort(out.pattern.begin(), out.pattern.end());
    out.pattern.erase(std::unique(out.pattern.begin(), out.pattern.end()), out.pattern.end());
    return out;
}

MatrixMarketData read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SolverError("cannot open '" + path + "'");
    return read_matrix_market(in);
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

void write_matrix_market(std::ostream& out, const ComplexMatrix& m, const std::string& comment) {
    const bool complex_field = !m.is_real(0.0);
    std::vector<IndexPair> nz;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != Complex(0.0)) nz.emplace_back(i, j);
    out << "%%MatrixMarket matrix coordinate " << (complex_field ? "complex" : "real")
        << " general\n";
    if (!comment.empty()) out << "% " << comment << "\n";
    out << m.rows() << " " << m.cols() << " " << nz.size() << "\n";
    for (const auto& [i, j] : nz) {
        out << (i + 1) << " " << (j + 1) << " " << format_full(m(i, j).real());
        if (complex_field) out << " " << format_full(m(i, j).imag());
        out << "\n";
    }
}

void write_matrix_market_file(const std::string& path, const ComplexMatrix& m,
                              const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot write '" + path + "'");
    write_matrix_market(out, m, comment);
}

std::vector<IndexPair> read_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SolverError("cannot open '" + path + "'");
    std::vector<IndexPair> pattern;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '%' || line[pos] == '#') continue;
        std::istringstream ss(line);
        long i = 0, j = 0;
        if (!(ss >> i >> j)) throw ParseError("malformed pattern line", lineno);
        if (i < 1 || j < 1) throw ParseError("pattern indices are 1-based", lineno);
        pattern.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
    }
    std::sort(pattern.begin(), pattern.end());
    pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());
    return pattern;
}

ComplexMatrix grcar(int n, double shift) {
    if (n < 5) throw DimensionMismatch("grcar requires n >= 5");
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) a(i, i - 1) = 1.0;
        a(i, i) = -1.0 - shift;
        for (int d = 1; d <= 3; ++d)
            if (i + d < n) a(i, i + d) = -1.0;
    }
    return a;
}

ComplexMatrix toeplitz_band(int n, int p, int q, const std::vector<Complex>& coefficients) {
    if (static_cast<int>(coefficients.size()) != p + q + 1)
        throw DimensionMismatch("toeplitz_band expects p+q+1 coefficients");
    ComplexMatrix a(n, n);
    for (int d = -p; d <= q; ++d) {
        const Complex c = coefficients[d + p];
        for (int i = 0; i < n; ++i) {
            const int j = i + d;
            if (j >= 0 && j < n) a(i, j) = c;
        }
    }
    return a;
}

// -- report and grid serialization ------------------------------------------

namespace {

const char* mode_name(OuterMode mode) {
    return mode == OuterMode::SolveDelta ? "radius-delta" : "radius-eps";
}

const char* param_name(OuterMode mode) {
    return mode == OuterMode::SolveDelta ? "delta" : "eps";
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

// finite -> full-precision literal; infinities are not valid JSON
std::string json_number(double v) {
    if (std::isfinite(v)) return format_full(v);
    return v > 0 ? "\"inf\"" : "\"-inf\"";
}

} // namespace

std::string trace_table(const OuterTrace& trace) {
    std::ostringstream out;
    const char* param = param_name(trace.mode);
    out << "  k   " << param << "_k";
    for (size_t i = std::string(param).size() + 2; i < 25; ++i) out << ' ';
    out << "Re lambda_k              # steps\n";
    for (const OuterRow& row : trace.rows) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%3d   %-23.16e %+.16e %6d\n", row.k, row.param,
                      row.re_lambda, row.inner_steps);
        out << buf;
    }
    out << "final " << param << " = " << format_full(trace.final_value)
        << (trace.status == OuterStatus::Converged ? "  (converged)"
                                                   : "  (max iterations reached)")
        << "\n";
    return out.str();
}

std::string trace_json(const OuterTrace& trace) {
    std::ostringstream out;
    out << "{\n  \"schema\": \"stabrad/1\",\n";
    out << "  \"mode\": \"" << mode_name(trace.mode) << "\",\n";
    out << "  \"eps\": " << json_number(trace.eps) << ",\n";
    out << "  \"delta\": " << json_number(trace.delta) << ",\n";
    out << "  \"rows\": [\n";
    for (size_t i = 0; i < trace.rows.size(); ++i) {
        const OuterRow& row = trace.rows[i];
        out << "    {\"k\": " << row.k << ", \"" << param_name(trace.mode)
            << "\": " << json_number(row.param)
            << ", \"re_lambda\": " << json_number(row.re_lambda)
            << ", \"steps\": " << row.inner_steps << "}";
        out << (i + 1 < trace.rows.size() ? ",\n" : "\n");
    }
    out << "  ],\n";
    out << "  \"final\": " << json_number(trace.final_value) << ",\n";
    out << "  \"bracket\": [" << json_number(trace.lb) << ", " << json_number(trace.ub)
        << "],\n";
    out << "  \"status\": \""
        << (trace.status == OuterStatus::Converged ? "converged" : "max-iterations") << "\",\n";
    out << "  \"warnings\": [";
    for (size_t i = 0; i < trace.warnings.size(); ++i)
        out << "\"" << json_escape(trace.warnings[i]) << "\""
            << (i + 1 < trace.warnings.size() ? ", " : "");
    out << "]\n}\n";
    return out.str();
}

std::string l2_report_json(const L2Report& report) {
    std::ostringstream out;
    out << "{\n  \"schema\": \"stabrad/1\",\n";
    out << "  \"kind\": \"l2-bound-certification\",\n";
    out << "  \"note\": \"sampled certification, not a proof\",\n";
    out << "  \"eps\": " << json_number(report.eps) << ",\n";
    out << "  \"delta\": " << json_number(report.delta) << ",\n";
    out << "  \"n_samples\": " << report.n_samples << ",\n";
    out << "  \"max_ratio\": " << json_number(report.max_ratio) << ",\n";
    out << "  \"bound\": " << json_number(report.bound) << ",\n";
    out << "  \"tol_quad\": " << json_number(report.tol_quad) << ",\n";
    out << "  \"violations\": [";
    for (size_t i = 0; i < report.violations.size(); ++i)
        out << report.violations[i] << (i + 1 < report.violations.size() ? ", " : "");
    out << "],\n  \"ratios\": [";
    for (size_t i = 0; i < report.ratios.size(); ++i)
        out << json_number(report.ratios[i]) << (i + 1 < report.ratios.size() ? ", " : "");
    out << "]\n}\n";
    return out.str();
}

std::string contour_bound_json(const ContourBound& bound) {
    std::ostringstream out;
    out << "{\n  \"schema\": \"stabrad/1\",\n";
    out << "  \"kind\": \"contour-transient-bound\",\n";
    out << "  \"eps\": " << json_number(bound.eps) << ",\n";
    out << "  \"gamma_length\": " << json_number(bound.gamma_length) << ",\n";
    out << "  \"bound\": " << json_number(bound.bound) << ",\n";
    out << "  \"components\": " << bound.components << "\n}\n";
    return out.str();
}

void write_field_csv(std::ostream& out, const ResolventField& field) {
    out << "re,im,sigma_min\n";
    for (int ix = 0; ix < field.grid.nx; ++ix)
        for (int iy = 0; iy < field.grid.ny; ++iy)
            out << format_full(field.grid.re_at(ix)) << "," << format_full(field.grid.im_at(iy))
                << "," << format_full(field.at(ix, iy)) << "\n";
}

void write_contours_csv(std::ostream& out, const std::vector<ContourPolyline>& contours,
                        double level) {
    out << "level,segment_id,re,im\n";
    for (size_t seg = 0; seg < contours.size(); ++seg)
        for (const Complex& p : contours[seg].points)
            out << format_full(level) << "," << seg << "," << format_full(p.real()) << ","
                << format_full(p.imag()) << "\n";
}

void write_clouds_csv(std::ostream& out, const std::vector<EigenCloud>& clouds) {
    out << "sample_id,re,im\n";
    for (size_t k = 0; k < clouds.size(); ++k)
        for (const Complex& l : clouds[k].eigenvalues)
            out << k << "," << format_full(l.real()) << "," << format_full(l.imag()) << "\n";
}

} // namespace stabrad
