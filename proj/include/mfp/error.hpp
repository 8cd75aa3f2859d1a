#pragma once

#include <stdexcept>
#include <string>

namespace mfp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-positive deformation Jacobian (an inverted element or state).
class KinematicsError : public Error {
public:
    using Error::Error;
};

/// Eigenvalue computation on a pathological tensor.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Parameter vector does not match the model signature.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Deformation/parameter combination outside the model's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class DescriptorError : public Error {
public:
    using Error::Error;
};

class LayoutError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A fingerprint block with zero Euclidean norm.
class DegenerateFingerprintError : public Error {
public:
    using Error::Error;
};

/// No database entry is eligible for the requested truncation.
class EmptyCandidateError : public Error {
public:
    using Error::Error;
};

/// Descriptor hash of an input does not match the expected protocol.
class ProtocolMismatchError : public Error {
public:
    using Error::Error;
};

/// Malformed database, fingerprint, or CSV input.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A sampling point falls into a region without displacement data.
class DropoutError : public Error {
public:
    using Error::Error;
};

/// Interpolation target outside the sampled range.
class ExtrapolationError : public Error {
public:
    using Error::Error;
};

} // namespace mfp
