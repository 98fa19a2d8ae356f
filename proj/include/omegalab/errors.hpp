#pragma once

#include <stdexcept>
#include <string>

namespace omegalab {

// Base for the domain errors raised by the library. Plain argument problems
// (bad index, overlapping combination) use std::invalid_argument and
// std::out_of_range instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The homomorphic extension of g does not permute the atoms.
struct InducedMapNotPermutation : Error {
  using Error::Error;
};

// An atom and its image have different numbers of free points, which only
// happens because the universe is finite.
struct CardinalityMismatch : Error {
  using Error::Error;
};

struct IncompatiblePair : Error {
  using Error::Error;
};

// An Eta lookup fell outside the grid.
struct GridOverflow : Error {
  using Error::Error;
};

struct PreconditionUnmet : Error {
  using Error::Error;
};

}  // namespace omegalab
