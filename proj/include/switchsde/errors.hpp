#pragma once

#include <stdexcept>
#include <string>

namespace switchsde {

/// Bad user-supplied configuration: unknown mode, non-positive rate,
/// dimension mismatch, malformed config file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid certificate: singular V/W, kappa <= kappa',
/// missing Loewner precondition for a bound-based chi term.
class CertificateError : public std::runtime_error {
public:
    explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical blow-up during integration; carries the first bad time.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double t)
        : std::runtime_error(what), time(t) {}
    double time;
};

}  // namespace switchsde
