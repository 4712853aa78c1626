#ifndef PPLDA_ERRORS_HPP
#define PPLDA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pplda {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or out-of-contract input (bad dimensions, invalid ranges,
/// unparsable files). Maps to CLI exit code 1.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A matrix required to be (positive) definite is numerically singular.
/// Maps to CLI exit code 2.
class SingularityError : public Error {
  public:
    using Error::Error;
};

/// Input data cannot support the requested estimate (e.g. a label group
/// is empty). Maps to CLI exit code 2.
class EstimationError : public Error {
  public:
    using Error::Error;
};

} // namespace pplda

#endif
