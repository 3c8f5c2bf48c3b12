#pragma once

#include <stdexcept>
#include <string>

namespace cdad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model input: bad shapes, unknown keys, dangling ids.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Two nominal invariants coincide, so regions cannot be decomposed.
class DegenerateModelError : public Error {
public:
    using Error::Error;
};

class SynthesisError : public Error {
public:
    using Error::Error;
};

/// The horizon search hit its cap without touching the neighbor hyperplane.
class HorizonError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class UnsupportedShapeError : public Error {
public:
    using Error::Error;
};

class NoGuaranteeError : public Error {
public:
    using Error::Error;
};

class OracleScaleError : public Error {
public:
    using Error::Error;
};

/// The observed event pair is impossible from the current observer node.
class DiscreteInconsistency : public Error {
public:
    using Error::Error;
};

}  // namespace cdad
