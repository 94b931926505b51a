#pragma once

#include <stdexcept>
#include <string>

namespace ctfm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a closed-form expression.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A parameter set violates a structural invariant (sample rate, cutoff, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Signals with mismatched length or sample rate were combined.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Echo delay is at or beyond the sweep period.
class UnsupportedRangeError : public Error {
public:
    using Error::Error;
};

/// Spectrum band holds no energy.
class NoPeakError : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be loaded. `field()` names the offending key.
class LoadError : public ConfigError {
public:
    LoadError(std::string field, const std::string& what)
        : ConfigError(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ctfm
