#include "leosched/csv.hpp"

#include "leosched/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace leosched::csv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

Reader::Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_header)
    : file_(path.string()) {
    std::ifstream in(path);
    if (!in) throw ParseError(file_, 0, 0, "cannot open file");

    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        Row row;
        row.line = lineno;
        std::size_t col = 1;
        std::size_t begin = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                row.fields.push_back(trim(line.substr(begin, i - begin)));
                row.columns.push_back(col);
                begin = i + 1;
                col = i + 2;
            }
        }

        if (!header_seen) {
            header_seen = true;
            if (row.fields != expected_header) {
                std::string want;
                for (std::size_t i = 0; i < expected_header.size(); ++i)
                    want += (i ? "," : "") + expected_header[i];
                throw ParseError(file_, lineno, 1, "bad header, expected: " + want);
            }
            continue;
        }
        if (row.fields.size() != expected_header.size())
            throw ParseError(file_, lineno, 1,
                             "expected " + std::to_string(expected_header.size()) + " fields, got " +
                                 std::to_string(row.fields.size()));
        rows_.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError(file_, lineno == 0 ? 1 : lineno, 1, "missing header row");
}

double Reader::num(const Row& row, std::size_t field) const {
    const std::string& s = row.fields.at(field);
    if (s.empty()) throw ParseError(file_, row.line, row.columns.at(field), "empty numeric field");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw ParseError(file_, row.line, row.columns.at(field), "not a number: '" + s + "'");
    return v;
}

const std::string& Reader::str(const Row& row, std::size_t field) const {
    return row.fields.at(field);
}

bool Reader::blank(const Row& row, std::size_t field) const {
    return row.fields.at(field).empty();
}

Writer::Writer(std::vector<std::string> header) : width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
    out_ += '\n';
}

void Writer::row(const std::vector<std::string>& fields) {
    if (fields.size() != width_)
        throw ValidationError("csv writer: row width " + std::to_string(fields.size()) +
                              " != header width " + std::to_string(width_));
    for (std::size_t i = 0; i < fields.size(); ++i) out_ += (i ? "," : "") + fields[i];
    out_ += '\n';
}

void Writer::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << out_;
}

std::string fmt(double value) {
    char buf[40];
    if (value == (double)(long long)value && std::abs(value) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%lld", (long long)value);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value) return buf;
    }
    return buf;
}

} // namespace leosched::csv
