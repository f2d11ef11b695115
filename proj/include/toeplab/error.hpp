#pragma once

#include <stdexcept>
#include <string>

namespace toeplab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model or symbol text, or an invalid parameter value.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Operands built on different models, or a vector of the wrong length.
class ModelMismatch : public Error {
public:
    using Error::Error;
};

/// Operands in bases that cannot be combined (hardy-fourier with an l2 basis).
class BasisMismatch : public Error {
public:
    using Error::Error;
};

/// A group-side symbol was passed where a dual-side one is required, or vice versa.
class SideError : public Error {
public:
    using Error::Error;
};

/// A symbol whose tail does not fit inside the represented grid.
class AliasingError : public Error {
public:
    AliasingError(const std::string& symbol, const std::string& what)
        : Error(what), symbol_(symbol) {}

    const std::string& symbol() const noexcept { return symbol_; }

private:
    std::string symbol_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The requested operation is not meaningful on this group (e.g. a compact one).
class UnsupportedModel : public Error {
public:
    using Error::Error;
};

/// A point that must lie on the sampling or dual grid does not.
class OffGridError : public Error {
public:
    using Error::Error;
};

/// Too few truncation levels to classify a point.
class InsufficientEvidence : public Error {
public:
    using Error::Error;
};

} // namespace toeplab
