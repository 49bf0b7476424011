// errors.hpp
#pragma once
#include <stdexcept>
#include <string>

namespace pbc {

// Precondition or domain violation on a named input (lambda outside [0,b),
// non-simplex weights, negative variance proxy, ...).
class DomainError : public std::domain_error {
public:
    DomainError(std::string field, const std::string& what)
        : std::domain_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Malformed or incomplete configuration (JSON/CSV input, missing keys).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pbc
