#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rehail {

/// Base class for all errors raised by the library. Everything derived from
/// it signals bad input or a violated precondition; logic_error-style bugs
/// (see CycleDetectedError) are kept separate so callers can map them to
/// distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An edge endpoint is out of range, from == to, or travel time is not positive.
class InvalidEdgeError : public Error {
public:
    using Error::Error;
};

/// Economic parameters out of domain (R <= 0, Q < 0, non-finite values).
class InvalidParamsError : public Error {
public:
    using Error::Error;
};

/// The node/edge set does not form a weakly connected graph.
class DisconnectedGraphError : public Error {
public:
    using Error::Error;
};

/// Edge index passed to a preprocessing step does not name a non-loop edge.
class UnknownEdgeError : public Error {
public:
    using Error::Error;
};

/// The solver was handed a network that fails the local-maxima scan.
class AssumptionViolatedError : public Error {
public:
    using Error::Error;
};

/// Driver parameters are NaN/infinite or otherwise unusable.
class NonFiniteParamsError : public Error {
public:
    using Error::Error;
};

/// A policy whose next-pointers revisit a node was given to an evaluator.
class CyclicPolicyError : public Error {
public:
    using Error::Error;
};

/// Path extraction revisited a node. Policies produced by solve() can never
/// trigger this; seeing it means a solver bug, so it derives from logic_error.
class CycleDetectedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The baseline target node cannot be reached from the requested start.
class UnreachableError : public Error {
public:
    using Error::Error;
};

/// Consecutive route nodes are not joined by an edge.
class NotAPathError : public Error {
public:
    using Error::Error;
};

/// OSM input is not well-formed XML; carries the byte offset of the defect.
class MalformedXmlError : public Error {
public:
    MalformedXmlError(const std::string& what, std::size_t byteOffset)
        : Error(what + " (byte " + std::to_string(byteOffset) + ")"), offset(byteOffset) {}
    std::size_t offset;
};

/// No whitelisted ways survived the OSM filter.
class EmptyExtractError : public Error {
public:
    using Error::Error;
};

/// A grid field is structurally unusable (bad dims, degenerate bbox, bad cells).
class InvalidGridError : public Error {
public:
    using Error::Error;
};

/// A structured text document failed to parse; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t lineNumber)
        : Error(what + " (line " + std::to_string(lineNumber) + ")"), line(lineNumber) {}
    std::size_t line;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace rehail
