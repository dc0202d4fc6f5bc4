#pragma once

#include <stdexcept>
#include <string>

namespace walkcover {

// Malformed or inconsistent user input (bad tree file, unknown label, ...).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured hard cap was hit (truncation length, oracle state count,
// subdivision length).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace walkcover
