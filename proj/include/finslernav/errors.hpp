#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finslernav {

// Base class for all toolkit errors. Subclasses distinguish input problems
// (parse/spec mistakes) from evaluation problems (domain violations).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Expression text could not be parsed; `offset` is the byte position of the
// first offending character.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& msg)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(std::size_t offset, const std::string& name)
        : ParseError(offset, "unknown identifier '" + name + "'") {}
};

class DimensionOutOfRangeError : public ParseError {
public:
    DimensionOutOfRangeError(std::size_t offset, const std::string& name, int dim)
        : ParseError(offset, "variable '" + name + "' exceeds dimension " + std::to_string(dim)) {}
};

// Evaluation left the domain of an elementary function (log of a non-positive
// constant term, division by a zero constant term, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

class OutsideConeError : public Error {
public:
    explicit OutsideConeError(const std::string& msg) : Error(msg) {}
};

class ZeroVectorError : public Error {
public:
    explicit ZeroVectorError(const std::string& msg) : Error(msg) {}
};

class NotPositiveDefiniteError : public Error {
public:
    explicit NotPositiveDefiniteError(const std::string& msg) : Error(msg) {}
};

class GuardViolatedError : public Error {
public:
    explicit GuardViolatedError(const std::string& msg) : Error(msg) {}
};

class DegeneratePlaneError : public Error {
public:
    explicit DegeneratePlaneError(const std::string& msg) : Error(msg) {}
};

class DegenerateFlagError : public Error {
public:
    explicit DegenerateFlagError(const std::string& msg) : Error(msg) {}
};

class DimensionTooSmallError : public Error {
public:
    explicit DimensionTooSmallError(const std::string& msg) : Error(msg) {}
};

class SingularFundamentalTensorError : public Error {
public:
    explicit SingularFundamentalTensorError(const std::string& msg) : Error(msg) {}
};

class RegimeMismatchError : public Error {
public:
    explicit RegimeMismatchError(const std::string& msg) : Error(msg) {}
};

class NoBracketError : public Error {
public:
    explicit NoBracketError(const std::string& msg) : Error(msg) {}
};

class NonConvergenceError : public Error {
public:
    explicit NonConvergenceError(const std::string& msg) : Error(msg) {}
};

class ConeViolationError : public Error {
public:
    explicit ConeViolationError(const std::string& msg) : Error(msg) {}
};

class SpeedLimitError : public Error {
public:
    explicit SpeedLimitError(const std::string& msg) : Error(msg) {}
};

class MixedRegimeError : public Error {
public:
    explicit MixedRegimeError(const std::string& msg) : Error(msg) {}
};

class DegenerateBetaError : public Error {
public:
    explicit DegenerateBetaError(const std::string& msg) : Error(msg) {}
};

class CertificateFailureError : public Error {
public:
    explicit CertificateFailureError(const std::string& msg) : Error(msg) {}
};

class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& msg) : Error(msg) {}
};

class SpecError : public Error {
public:
    explicit SpecError(const std::string& msg) : Error(msg) {}
};

} // namespace finslernav
