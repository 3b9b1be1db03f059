#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hokalman {

/// Real dense matrix stored row-major.
///
/// Entry (i, j) lives at data()[i * cols() + j]. A default-constructed matrix
/// is 0x0; every public operation that needs data rejects empty inputs.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    /// Row-by-row literal, mostly for tests: DenseMatrix::from_rows({{1, 2}, {3, 4}}).
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);
    /// rows x cols matrix with `values` on its main diagonal.
    static DenseMatrix diagonal(std::size_t rows, std::size_t cols, std::span<const double> values);
    static DenseMatrix column(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> entries() const noexcept { return data_; }
    std::span<double> entries() noexcept { return data_; }

    std::vector<double> column_copy(std::size_t j) const;

    /// Copy of the block starting at (r0, c0) with the given extent.
    DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const;
    void set_block(std::size_t r0, std::size_t c0, const DenseMatrix& src);
    DenseMatrix left_columns(std::size_t n) const { return block(0, 0, rows_, n); }
    DenseMatrix top_rows(std::size_t n) const { return block(0, 0, n, cols_); }

    DenseMatrix transposed() const;

    bool all_finite() const noexcept;
    /// Throws DimensionError when any entry is NaN or infinite.
    void require_finite(const char* what) const;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double s) noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

/// Horizontal concatenation [a | b]; both must have the same row count.
DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

// Matrix CSV: `# rows=<r> cols=<c>` header, then r lines of c values printed
// with 17 significant digits so doubles round-trip exactly.
void write_csv_body(std::ostream& out, const DenseMatrix& a);
void write_matrix_csv(std::ostream& out, const DenseMatrix& a);
void write_matrix_csv(const std::string& path, const DenseMatrix& a);
DenseMatrix read_matrix_csv(std::istream& in, const std::string& source = "<stream>");
DenseMatrix read_matrix_csv(const std::string& path);

/// Parses one CSV row of decimal values; used by every file reader.
std::vector<double> parse_csv_values(const std::string& line, const std::string& source, std::size_t lineno);
std::string format_double(double v);

} // namespace hokalman
