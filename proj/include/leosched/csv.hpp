#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace leosched::csv {

// One parsed row with its source position, for diagnostics.
struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0;                  // 1-based
    std::vector<std::size_t> columns;      // 1-based start column per field
};

// Strict comma-separated reader: UTF-8, no quoting, '.' decimal point,
// '#' starts a comment line, blank lines skipped.
// The first non-comment row must match `expected_header` exactly.
class Reader {
public:
    Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

    const std::vector<Row>& rows() const { return rows_; }
    const std::string& file() const { return file_; }

    // Typed field access; throws ParseError with file/line/column on bad input.
    double num(const Row& row, std::size_t field) const;
    const std::string& str(const Row& row, std::size_t field) const;
    bool blank(const Row& row, std::size_t field) const;

private:
    std::string file_;
    std::vector<Row> rows_;
};

class Writer {
public:
    explicit Writer(std::vector<std::string> header);
    void row(const std::vector<std::string>& fields);
    void save(const std::filesystem::path& path) const;
    std::string str() const { return out_; }

private:
    std::string out_;
    std::size_t width_;
};

// Shortest decimal string that parses back to exactly the same double.
std::string fmt(double value);

} // namespace leosched::csv
