#pragma once
#include <stdexcept>
#include <string>

namespace mqc {

// Error categories map 1:1 onto the CLI exit codes.
enum class ErrorKind {
    validation = 2,  // bad input data or configuration
    numerical = 3,   // solver / flow failure
    io = 4,          // file system and parsing
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& msg) {
    throw Error(ErrorKind::validation, msg);
}
[[noreturn]] inline void fail_numerical(const std::string& msg) {
    throw Error(ErrorKind::numerical, msg);
}
[[noreturn]] inline void fail_io(const std::string& msg) {
    throw Error(ErrorKind::io, msg);
}

}  // namespace mqc
