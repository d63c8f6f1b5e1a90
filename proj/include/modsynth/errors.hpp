#pragma once

#include <stdexcept>
#include <string>

namespace modsynth {

// Bad parameters or malformed requests.  The CLI maps this to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally invalid circuits, netlists, or companion files.  Exit code 3.
struct StructError : std::runtime_error {
  explicit StructError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace modsynth
