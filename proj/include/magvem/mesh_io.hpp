// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Mesh files.
//
// Native JSON (version 1):
//   {
//     "version": 1,
//     "vertices": [[x, y, z], ...],
//     "edges": [[tail, head], ...],                    0-based vertex ids
//     "faces": [{"edges": [+-k, ...]}, ...],           1-based, sign = orientation
//     "cells": [{"faces": [+-k, ...], "subdomain": s}, ...],
//     "boundary_faces": [f, ...]                       0-based face ids
//   }
//
// VTK: legacy ASCII unstructured grid. Polyhedra (type 42), tetrahedra (10),
// hexahedra (12) and wedges (13) are read; cell data "subdomain" is honoured.
// Writing always emits polyhedra.

#ifndef MAGVEM_MESH_IO_HPP
#define MAGVEM_MESH_IO_HPP

#include "magvem/mesh.hpp"

#include <map>
#include <string>
#include <vector>

namespace magvem {

enum class MeshFormat { NativeJson, VtkPolyhedral };

/// ".json" -> NativeJson, ".vtk" -> VtkPolyhedral; otherwise InvalidArgument.
MeshFormat format_from_path(const std::string& path);

std::string to_native_json(const PolyMesh& mesh);
PolyMesh from_native_json(const std::string& text);

PolyMesh from_vtk(const std::string& text);

/// Cell-data fields attached to a VTK export.
struct VtkCellData {
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<Vec3>> vectors;
};
std::string to_vtk(const PolyMesh& mesh, const VtkCellData& data = {});

/// Reads a mesh. Throws ParseError (with line and offset) for malformed
/// input and, when `check` is set, TopologyError naming the first violated
/// invariant.
PolyMesh load_mesh(const std::string& path, MeshFormat format, bool check = true);
PolyMesh load_mesh(const std::string& path, bool check = true);

void save_mesh(const PolyMesh& mesh, const std::string& path, MeshFormat format);
void save_mesh(const PolyMesh& mesh, const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace magvem

#endif  // MAGVEM_MESH_IO_HPP
