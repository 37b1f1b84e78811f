// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MAGVEM_ERRORS_HPP
#define MAGVEM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace magvem {

enum class ErrorKind {
  InvalidArgument,
  PerturbationRejected,
  InvalidPolygon2D,
  ParseError,
  TopologyError,
  IoError,
  NonPlanarFace,
  DegenerateFace,
  DegenerateCell,
  NotSPD,
  NonPositivePermeability,
  EmptyInterior,
  SolverBreakdown,
  ToleranceNotReached,
  NotImplemented,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace magvem

#endif  // MAGVEM_ERRORS_HPP
