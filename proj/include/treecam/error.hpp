#pragma once

#include <stdexcept>
#include <string>

namespace treecam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unreadable input (CSV, tree document, config file).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed (malformed tree, rule outside codebook).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace treecam
