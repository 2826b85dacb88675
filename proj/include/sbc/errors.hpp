#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Jet arithmetic misuse: order mismatch, order overflow, division by a
/// jet whose value is zero.
struct JetError : Error {
    using Error::Error;
};

/// Expression text could not be parsed. `offset` is the byte offset of the
/// first offending character.
struct ParseError : Error {
    ParseError(std::size_t offset_, const std::string& what_)
        : Error(what_ + " (offset " + std::to_string(offset_) + ")"), offset(offset_) {}
    std::size_t offset;
};

/// Expression evaluation failed (division by zero, domain error, unbound
/// variable). `offset` locates the offending node in the source text.
struct EvalError : Error {
    EvalError(std::size_t offset_, const std::string& what_)
        : Error(what_ + " (offset " + std::to_string(offset_) + ")"), offset(offset_) {}
    std::size_t offset;
};

/// A model/controller/sim configuration violates a structural invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// Numerical abort during simulation or control evaluation: nonfinite
/// signal or an input gain too close to zero.
struct NumericError : Error {
    NumericError(const std::string& what_, double t_ = 0.0, int subsystem_ = 0)
        : Error(what_), t(t_), subsystem(subsystem_) {}
    double t;       ///< simulation time of the abort, when known
    int subsystem;  ///< 1-based subsystem index, 0 if not applicable
};

}  // namespace sbc
