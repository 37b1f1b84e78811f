// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/errors.hpp"

namespace magvem {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PerturbationRejected: return "PerturbationRejected";
    case ErrorKind::InvalidPolygon2D: return "InvalidPolygon2D";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::TopologyError: return "TopologyError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonPlanarFace: return "NonPlanarFace";
    case ErrorKind::DegenerateFace: return "DegenerateFace";
    case ErrorKind::DegenerateCell: return "DegenerateCell";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::NonPositivePermeability: return "NonPositivePermeability";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::SolverBreakdown: return "SolverBreakdown";
    case ErrorKind::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorKind::NotImplemented: return "NotImplemented";
  }
  return "Unknown";
}

}  // namespace magvem
