#ifndef SYNTHWRIGHT_ERRORS_HPP
#define SYNTHWRIGHT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace synthwright {

// Base class for everything thrown on purpose by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad inputs: malformed files, impossible parameters, contradictory requests.
// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Filesystem and subprocess failures. The CLI maps these to exit code 2.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace synthwright

#endif
