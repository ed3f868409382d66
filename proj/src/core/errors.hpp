#pragma once

#include <stdexcept>
#include <string>

namespace hazclust {

// Error classes map one-to-one onto the C API status codes and CLI exit codes.
enum class ErrorKind {
    InvalidParameter,
    Domain,
    Config,
    Schema,
    Numerical,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hazclust
