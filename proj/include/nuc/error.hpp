#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nuc {

// Bad input or violated invariant. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed line in a JSONL file.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Transport or server failure after retries. CLI maps this to exit code 2.
class RemoteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure. CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nuc
