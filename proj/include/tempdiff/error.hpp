#pragma once

#include <stdexcept>
#include <string>

namespace tempdiff {

// Base error for all failures raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unreadable input file; message names the offending line.
class LoadError : public Error {
public:
    LoadError(const std::string& path, size_t line, const std::string& msg)
        : Error(path + ":" + std::to_string(line) + ": " + msg),
          path_(path), line_(line) {}

    const std::string& path() const { return path_; }
    size_t line() const { return line_; }

private:
    std::string path_;
    size_t line_;
};

// An in-memory object violates a type invariant.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace tempdiff
