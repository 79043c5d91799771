#pragma once

#include <stdexcept>
#include <string>

namespace thermoscan {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated (dimension mismatch, out-of-bounds box, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Malformed external data: PGM, CSV, anchor or config files.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace thermoscan
