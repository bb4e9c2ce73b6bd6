#pragma once

#include <stdexcept>
#include <string>

namespace sbmkit {

// Malformed input: out-of-range ids, unparsable files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid objects: duplicate edges, self-loops, bad labels.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model parameters outside their domain.
class ParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive oracles refuse instances beyond their enumeration budget.
class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbmkit
