#pragma once

#include <stdexcept>
#include <string>

namespace dynprice {

// Base class for every error raised by the library. Invalid input is
// reported through exceptions; the CLI maps them to exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace dynprice
