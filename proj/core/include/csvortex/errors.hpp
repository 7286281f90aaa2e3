#ifndef CSVORTEX_ERRORS_HPP
#define CSVORTEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csvortex {

// Seed-expansion quadrature failed to converge; usually means r0 is too
// large for the local expansion around the origin.
struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& msg) : std::runtime_error(msg) {}
};

struct WindowTooShort : std::runtime_error {
    explicit WindowTooShort(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotTopological : std::runtime_error {
    explicit NotTopological(const std::string& msg) : std::runtime_error(msg) {}
};

struct WrongKind : std::runtime_error {
    explicit WrongKind(const std::string& msg) : std::runtime_error(msg) {}
};

struct BadBracket : std::runtime_error {
    explicit BadBracket(const std::string& msg) : std::runtime_error(msg) {}
};

struct BadCenter : std::runtime_error {
    explicit BadCenter(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace csvortex

#endif
