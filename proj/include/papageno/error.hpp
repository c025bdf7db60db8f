#pragma once

#include <stdexcept>
#include <string>

namespace papageno {

// Base error for every failure surfaced by the library. Callers that only
// want "did it work" can catch this; the CLI maps it to a nonzero exit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace papageno
