#pragma once

#include <stdexcept>
#include <string>

namespace socsim {

/// Base class for every error raised by the simulator library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (e.g. a write on an instruction cache).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A data reference left the issuing core's segment and every shared region.
class SegmentationFault : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Cost or timing calibration could not produce a usable fit.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// A design point that does not fit the device budget was asked to run.
class InfeasibleDesign : public Error {
public:
    using Error::Error;
};

}  // namespace socsim
