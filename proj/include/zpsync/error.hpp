#ifndef ZPSYNC_ERROR_HPP
#define ZPSYNC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace zpsync {

/// Invalid system, noise, profile or experiment parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested index or delay lies outside the supported range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A function argument lies outside its mathematical domain (e.g. negative variance).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An estimator was invoked outside the regime it is defined for.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace zpsync

#endif  // ZPSYNC_ERROR_HPP
