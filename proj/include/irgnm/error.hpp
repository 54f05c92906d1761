#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irgnm {

enum class ErrorKind
{
    invalid_input, // precondition or domain violation
    parse,         // malformed file or config
    numerical,     // non-finite values, solver failure
    io
};

inline std::string_view to_string(ErrorKind k)
{
    switch (k) {
        case ErrorKind::invalid_input: return "invalid_input";
        case ErrorKind::parse: return "parse";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace irgnm
