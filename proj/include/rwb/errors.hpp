#pragma once

#include <stdexcept>
#include <string>

namespace rwb {

/// Caller supplied an argument outside the operation's domain.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quantity that is provably well defined on shell came out inconsistent.
/// Signals a formula bug rather than bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Analytic derivative requested at an excluded near-singular point.
class NearSingularInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite values appeared during time integration.
class BlowUp : public std::runtime_error {
public:
    BlowUp(double t, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(t)), t_(t)
    {
    }
    double time() const { return t_; }

private:
    double t_;
};

/// Config file problem, carrying the 1-based line number (0 when the error is
/// not tied to a line, e.g. a missing key).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace rwb
