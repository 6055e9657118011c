#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gapminer {

using Year = std::int32_t;
using PaperIndex = std::uint32_t;
using ConceptIndex = std::uint32_t;
using AuthorIndex = std::uint32_t;

// Error hierarchy. Each class maps onto one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class InvariantError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

#define GAPMINER_CHECK(cond, msg)                                        \
  do {                                                                   \
    if (!(cond)) throw ::gapminer::InvariantError(std::string(msg));     \
  } while (0)

}  // namespace gapminer
