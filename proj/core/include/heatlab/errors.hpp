#pragma once

#include <stdexcept>
#include <string>

namespace heatlab {

/// Base class for every error raised by heatlab.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix or field entry is NaN or infinite.
class NonFinite : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside a solution's validity domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Construction parameters violate a documented constraint.
class ParamError : public Error {
public:
    using Error::Error;
};

class BoundaryIndex : public Error {
public:
    using Error::Error;
};

class QuadratureUnderresolved : public Error {
public:
    using Error::Error;
};

class UnsupportedProfile : public Error {
public:
    using Error::Error;
};

class DivergentMass : public Error {
public:
    using Error::Error;
};

/// Malformed experiment configuration or scheme settings (CFL, grid size).
class ConfigError : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace heatlab
