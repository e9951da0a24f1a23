#pragma once

#include <stdexcept>
#include <string>

namespace logitbench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: wrong dimensions, non-finite values, out-of-range settings.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The data cannot support the requested operation (e.g. a single outcome class).
class DegenerateData : public Error {
public:
    using Error::Error;
};

class TuningFailed : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace logitbench
