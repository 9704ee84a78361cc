#pragma once

#include <stdexcept>
#include <string>

namespace ks {

// Base of every error raised by the library. Each subtype corresponds to one
// precondition family so callers (and the CLI) can report them distinctly.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

class DegenerateParameterError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class ScheduleError : public Error {
public:
    using Error::Error;
};

class IncompleteAssignmentError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

class ChainIntegrityError : public Error {
public:
    using Error::Error;
};

class ContextError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace ks
