#ifndef IONMOD_ERRORS_HPP
#define IONMOD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ionmod {

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical evaluation failed. Carries the physical or dimensionless time
/// of the failing point when one is known (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double at_time = -1.0)
        : std::runtime_error(what), at_time_(at_time) {}

    double at_time() const noexcept { return at_time_; }

private:
    double at_time_;
};

/// Transfer-function denominator vanished (evaluation point too close to a pole).
class PoleProximityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// File could not be written or read (CLI exit code 4).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ionmod

#endif  // IONMOD_ERRORS_HPP
