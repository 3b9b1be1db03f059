#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>

#include "hokalman/matrix.hpp"

namespace hokalman::csv {

/// Line-oriented reader that tracks the 1-based line number for error messages.
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    /// Next line with trailing '\r' stripped; false at end of input.
    bool next(std::string& line);
    /// Like next(), but a missing line is a ParseError mentioning `expected`.
    std::string require(const char* expected);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

    [[noreturn]] void fail(const std::string& what) const;

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
};

/// Parses a `# key=value key=value` header line into a map.
std::map<std::string, std::string> parse_header(const std::string& line, const LineReader& reader);

/// Reads a positive count field from a parsed header.
std::size_t header_count(const std::map<std::string, std::string>& fields, const std::string& key,
                         const LineReader& reader);

/// Reads `rows` lines of `cols` comma-separated values.
DenseMatrix read_body(LineReader& reader, std::size_t rows, std::size_t cols);

} // namespace hokalman::csv
