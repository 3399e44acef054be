#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcw {

// Invalid inputs or configuration. Mapped to the CLI "data error" exit code.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed on-disk data; carries the 1-based line number of the offence.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Numeric failure during optimization (non-finite loss).
class TrainingError : public std::runtime_error {
public:
    TrainingError(std::size_t epoch, const std::string& what)
        : std::runtime_error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace fcw
