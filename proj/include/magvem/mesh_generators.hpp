// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MAGVEM_MESH_GENERATORS_HPP
#define MAGVEM_MESH_GENERATORS_HPP

#include "magvem/mesh.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace magvem {

/// Axis-aligned box.
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

/// n^3 hexahedra on `box`.
PolyMesh generate_structured_hex(int n, const Box& box = {});

/// Structured hexahedra with every interior vertex displaced by a uniform
/// random offset of at most `amplitude * h` per coordinate. Faces that are no
/// longer planar are split along the diagonal through their smallest vertex
/// index, so every face of the result is planar. Throws PerturbationRejected
/// when amplitude is outside [0, 0.3] or the result fails validation.
PolyMesh generate_perturbed_hex(int n, const Box& box, double amplitude, std::uint64_t seed);

inline constexpr double kMaxPerturbation = 0.3;

/// Planar polygonal complex; polygons are counterclockwise vertex loops.
struct PolygonMesh2D {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> polygons;
  std::vector<int> regions;  ///< optional per-polygon label
};

/// Throws InvalidPolygon2D naming the first defect.
void validate_polygon_mesh(const PolygonMesh2D& mesh);

/// Maps (cell centroid, 2D region of the source polygon) to a subdomain id.
using SubdomainClassifier = std::function<int(const Vec3& centroid, int region)>;

/// Prisms over each polygon between consecutive z levels.
PolyMesh generate_extruded(const PolygonMesh2D& mesh2d, const std::vector<double>& z_levels,
                           const SubdomainClassifier& classify = {});

/// `layers` uniform layers on [0, height].
PolyMesh generate_extruded(const PolygonMesh2D& mesh2d, int layers, double height,
                           const SubdomainClassifier& classify = {});

PolygonMesh2D unit_square_polygon();
PolygonMesh2D regular_polygon(int sides, double radius);

/// Patch of regular hexagons: `rings` = 1 is a single hexagon, each further
/// ring adds the next layer of neighbours.
PolygonMesh2D honeycomb(int rings, double hex_radius);

/// Disk tessellation by concentric circles. The innermost circle bounds a
/// single polygon with `base_sectors` sides; each ring between consecutive
/// circles is split into sectors, the sector count doubling whenever the
/// outer arc exceeds `arc_factor` times the ring width. Sectors whose outer
/// circle is finer become pentagons. Region = ring index.
PolygonMesh2D polar_disk(const std::vector<double>& radii, int base_sectors, double arc_factor);

}  // namespace magvem

#endif  // MAGVEM_MESH_GENERATORS_HPP
