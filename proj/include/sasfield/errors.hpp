// Exception types that the command-line front end maps to exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace sasfield {

/// A mathematical precondition failed (alpha out of range, p = 0 scaling, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration document is malformed or violates its schema.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sasfield
