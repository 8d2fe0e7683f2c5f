#pragma once

#include <stdexcept>
#include <string>

namespace alkit {

// Violated precondition or invalid value passed to an operation.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external input (CSV file, manifest, artifact container).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Artifact/schema version or shape mismatch.
class CompatibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace alkit
