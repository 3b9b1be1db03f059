#include "hokalman/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "hokalman/csv.hpp"
#include "hokalman/error.hpp"

namespace hokalman {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("DenseMatrix: " + std::to_string(data_.size()) + " entries for a " +
                             std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<double> entries;
    entries.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("from_rows: ragged rows");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return {r, c, std::move(entries)};
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
    return diagonal(values.size(), values.size(), values);
}

DenseMatrix DenseMatrix::diagonal(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() > std::min(rows, cols)) throw DimensionError("diagonal: too many values for shape");
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> values) {
    return {values.size(), 1, std::vector<double>(values.begin(), values.end())};
}

std::vector<double> DenseMatrix::column_copy(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const {
    if (r0 + nrows > rows_ || c0 + ncols > cols_) throw DimensionError("block: out of range");
    DenseMatrix out(nrows, ncols);
    for (std::size_t i = 0; i < nrows; ++i) {
        const double* src = data_.data() + (r0 + i) * cols_ + c0;
        std::copy(src, src + ncols, out.data() + i * ncols);
    }
    return out;
}

void DenseMatrix::set_block(std::size_t r0, std::size_t c0, const DenseMatrix& src) {
    if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_) throw DimensionError("set_block: out of range");
    for (std::size_t i = 0; i < src.rows(); ++i) {
        std::copy(src.row(i).begin(), src.row(i).end(), data_.data() + (r0 + i) * cols_ + c0);
    }
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    constexpr std::size_t tile = 32;
    for (std::size_t i0 = 0; i0 < rows_; i0 += tile) {
        for (std::size_t j0 = 0; j0 < cols_; j0 += tile) {
            const std::size_t i1 = std::min(rows_, i0 + tile);
            const std::size_t j1 = std::min(cols_, j0 + tile);
            for (std::size_t i = i0; i < i1; ++i)
                for (std::size_t j = j0; j < j1; ++j) t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void DenseMatrix::require_finite(const char* what) const {
    if (!all_finite()) throw DimensionError(std::string(what) + ": non-finite entry");
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("operator+=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("operator-=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("hconcat: row mismatch");
    DenseMatrix out(a.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(0, a.cols(), b);
    return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, end);
}

void write_csv_body(std::ostream& out, const DenseMatrix& a) {
    std::string line;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) line += ',';
            line += format_double(a(i, j));
        }
        line += '\n';
        out << line;
    }
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& a) {
    out << "# rows=" << a.rows() << " cols=" << a.cols() << '\n';
    write_csv_body(out, a);
}

void write_matrix_csv(const std::string& path, const DenseMatrix& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_matrix_csv(out, a);
}

std::vector<double> parse_csv_values(const std::string& line, const std::string& source, std::size_t lineno) {
    std::vector<double> values;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() ) throw ParseError(source, lineno, "expected a decimal value");
        if (!std::isfinite(v)) throw ParseError(source, lineno, "non-finite value");
        values.push_back(v);
        p = next;
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        if (p == end) break;
        if (*p != ',') throw ParseError(source, lineno, "expected ','");
        ++p;
    }
    return values;
}

DenseMatrix read_matrix_csv(std::istream& in, const std::string& source) {
    csv::LineReader reader(in, source);
    const auto fields = csv::parse_header(reader.require("matrix header"), reader);
    const std::size_t rows = csv::header_count(fields, "rows", reader);
    const std::size_t cols = csv::header_count(fields, "cols", reader);
    return csv::read_body(reader, rows, cols);
}

DenseMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix_csv(in, path);
}

namespace csv {

bool LineReader::next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::string LineReader::require(const char* expected) {
    std::string line;
    if (!next(line)) throw ParseError(source_, line_ + 1, std::string("unexpected end of file, expected ") + expected);
    return line;
}

void LineReader::fail(const std::string& what) const { throw ParseError(source_, line_, what); }

std::map<std::string, std::string> parse_header(const std::string& line, const LineReader& reader) {
    if (line.empty() || line.front() != '#') reader.fail("expected a '# key=value' header");
    std::map<std::string, std::string> fields;
    std::size_t pos = 1;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t stop = line.find(' ', pos);
        if (stop == std::string::npos) stop = line.size();
        const std::string token = line.substr(pos, stop - pos);
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos || eq == 0) reader.fail("malformed header token '" + token + "'");
        fields[token.substr(0, eq)] = token.substr(eq + 1);
        pos = stop;
    }
    return fields;
}

std::size_t header_count(const std::map<std::string, std::string>& fields, const std::string& key,
                         const LineReader& reader) {
    const auto it = fields.find(key);
    if (it == fields.end()) reader.fail("header is missing '" + key + "'");
    std::size_t value = 0;
    const auto& s = it->second;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size() || value == 0) {
        reader.fail("header field '" + key + "' must be a positive integer");
    }
    return value;
}

DenseMatrix read_body(LineReader& reader, std::size_t rows, std::size_t cols) {
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string line = reader.require("matrix row");
        const auto values = parse_csv_values(line, reader.source(), reader.line());
        if (values.size() != cols) {
            reader.fail("expected " + std::to_string(cols) + " values, found " + std::to_string(values.size()));
        }
        std::copy(values.begin(), values.end(), out.data() + i * cols);
    }
    return out;
}

} // namespace csv
} // namespace hokalman
