#pragma once

#include <stdexcept>
#include <string>

namespace d2gan {

// Argument outside the mathematical domain of a function (t <= 0, alpha <= 0, ...).
using DomainError = std::domain_error;

// A documented ordering or positivity constraint does not hold, e.g. the
// alpha2 > alpha1 requirement for the closed-form optimal discriminators.
class ConstraintViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A 1-D supremum search found its maximum pinned at the edge of the scanned range.
class UnboundedObjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or corrupt on-disk artifact (checkpoint, config, csv).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace d2gan
