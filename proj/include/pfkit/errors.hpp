#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "pfkit/rational.hpp"

namespace pfkit {

// Base of every error raised by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Objects from different spaces combined, sizes out of range and the like.
struct StructuralError : Error {
  using Error::Error;
};

// Input that is well-formed but violates a domain invariant.
struct ValidationError : Error {
  using Error::Error;
};

struct NotMeasurePreserving : ValidationError {
  NotMeasurePreserving(std::size_t atom_index, std::string atom_label, Rational expected_mass,
                       Rational actual_mass)
      : ValidationError("map is not measure preserving at atom '" + atom_label + "': preimage mass " +
                        actual_mass.str() + " != " + expected_mass.str()),
        atom(atom_index), label(std::move(atom_label)), expected(std::move(expected_mass)),
        actual(std::move(actual_mass)) {}

  std::size_t atom;
  std::string label;
  Rational expected;
  Rational actual;
};

struct NegativeDensity : ValidationError {
  using ValidationError::ValidationError;
};

struct NullTrace : ValidationError {
  using ValidationError::ValidationError;
};

struct ParseError : Error {
  using Error::Error;
};

struct BadBinCount : ValidationError {
  using ValidationError::ValidationError;
};

struct NonStochasticRow : Error {
  using Error::Error;
};

// Two independent computational routes disagreed. Always a bug.
struct DiagnosticFailure : Error {
  using Error::Error;
};

} // namespace pfkit
