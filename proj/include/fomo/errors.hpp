#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fomo {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input too large for the requested method (e.g. subset enumeration).
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Input whose generation would never terminate.
class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Errors tied to a position in a line-oriented input. line() is 1-based, 0
// when no particular line is at fault. what() reads "source:line: message".
class LineError : public std::runtime_error {
public:
    LineError(const std::string& message, std::size_t line, const std::string& source = {})
        : std::runtime_error(compose(message, line, source)),
          message_(message),
          source_(source),
          line_(line) {}

    const std::string& message() const noexcept { return message_; }
    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string compose(const std::string& message, std::size_t line,
                               const std::string& source) {
        std::string out = source;
        if (line != 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
        return out.empty() ? message : out + ": " + message;
    }

    std::string message_;
    std::string source_;
    std::size_t line_;
};

class ParseError : public LineError {
public:
    using LineError::LineError;
};

class ValidationError : public LineError {
public:
    using LineError::LineError;
};

namespace detail {

inline void require_domain(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail

}  // namespace fomo
