#pragma once

#include <stdexcept>
#include <string>

namespace ctsw {

// Base for every error the library throws. kind() is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
};

class InputError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "input_error"; }
};

class DecodeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "decode_error"; }
};

class EnumerationTooLarge : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "enumeration_too_large"; }
};

class ConvergenceError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "convergence_error"; }
};

}  // namespace ctsw
