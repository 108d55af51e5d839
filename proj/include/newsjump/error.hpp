#pragma once

#include <stdexcept>
#include <string>

namespace newsjump {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or format mapping (bad header, bad flag value, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data that cannot be processed (unparseable file, uncovered dates, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

/// File system failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace newsjump
