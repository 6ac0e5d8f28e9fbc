#pragma once

#include <stdexcept>
#include <string>

namespace musekb {

// Error taxonomy used across the library. The CLI maps any of these to
// exit code 1; usage errors (bad flags, unknown subcommand) exit 2.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be opened / read / written.
struct IoError : Error {
    using Error::Error;
};

// Input bytes could not be parsed; message carries file/line context.
struct ParseError : Error {
    using Error::Error;
};

// Parsed data violates a documented precondition (duplicate ids,
// out-of-range values, unknown references, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Inconsistent configuration (bad threshold, missing tagger, bad window...).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace musekb
