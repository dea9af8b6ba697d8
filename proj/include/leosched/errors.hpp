#pragma once

#include <stdexcept>
#include <string>

namespace leosched {

// Battery ran out of available charge while a step was in progress.
// `time` is the depletion instant in seconds since the scenario epoch.
class DepletedError : public std::runtime_error {
public:
    explicit DepletedError(double time)
        : std::runtime_error("battery depleted at t=" + std::to_string(time) + " s"),
          time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

// Even the empty task selection cannot keep the battery above the SoC floor.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(double time, std::string detail)
        : std::runtime_error("infeasible: " + detail + " at t=" + std::to_string(time) + " s"),
          time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

// Malformed input file. Carries file/line/column for diagnostics.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, std::size_t line, std::size_t column, std::string what)
        : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                             ": " + what),
          file_(std::move(file)), line_(line), column_(column) {}
    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

// Structurally valid input that violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class EmptyLogError : public std::runtime_error {
public:
    EmptyLogError() : std::runtime_error("telemetry log is empty") {}
};

// Plan upload attempted while the satellite is not inside any ground pass.
class OutOfPassError : public std::runtime_error {
public:
    explicit OutOfPassError(double time)
        : std::runtime_error("upload outside any pass window at t=" + std::to_string(time) + " s") {}
};

} // namespace leosched
