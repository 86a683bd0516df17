#pragma once

#include <stdexcept>
#include <string>

namespace optpac {

/// Input size does not match the shape an algorithm requires (e.g. |S| not a power of 6).
class BadShape : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters outside the range where a formula or algorithm is defined.
class BadParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No hypothesis of the oracle's class is consistent with the sample.
class NotRealizable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative ERM exceeded its pass budget.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A random string was asked for more blocks than it holds.
class StreamExhausted : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace optpac
