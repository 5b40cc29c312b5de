#ifndef HSIBAND_ERROR_HPP
#define HSIBAND_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hsiband {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: missing files, malformed headers, out-of-range
/// parameters. The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace hsiband

#endif
