// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/errors.hpp"
#include "magvem/mesh.hpp"
#include "magvem/mesh_generators.hpp"
#include "test_meshes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace magvem {
namespace {

using testing::mesh_zoo;

bool has_violation(const ValidationReport& rep, const std::string& invariant) {
  for (const auto& v : rep.violations)
    if (v.invariant == invariant) return true;
  return false;
}

TEST(MeshBuilder, UnitCubeCounts) {
  const PolyMesh m = generate_structured_hex(1);
  EXPECT_EQ(m.num_vertices(), 8);
  EXPECT_EQ(m.num_edges(), 12);
  EXPECT_EQ(m.num_faces(), 6);
  EXPECT_EQ(m.num_cells(), 1);
  EXPECT_NEAR(m.cell_geometry(0).volume, 1.0, 1e-15);
  EXPECT_NEAR(m.cell_geometry(0).diameter, std::sqrt(3.0), 1e-15);
  EXPECT_TRUE((m.cell_geometry(0).barycenter - Vec3(0.5, 0.5, 0.5)).norm() < 1e-15);
  EXPECT_TRUE(validate(m).ok());
}

TEST(MeshBuilder, StructuredCountsFollowClosedForm) {
  for (int n : {2, 3, 5}) {
    const PolyMesh m = generate_structured_hex(n);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1) * (n + 1));
    EXPECT_EQ(m.num_edges(), 3 * n * (n + 1) * (n + 1));
    EXPECT_EQ(m.num_faces(), 3 * n * n * (n + 1));
    EXPECT_EQ(m.num_cells(), n * n * n);
    EXPECT_NEAR(m.mean_cell_diameter(), std::sqrt(3.0) / n, 1e-14);
  }
}

TEST(MeshBuilder, EdgesOrientedTailBelowHead) {
  for (const auto& [name, m] : mesh_zoo())
    for (const auto& e : m.edges()) EXPECT_LT(e.tail, e.head) << name;
}

TEST(MeshBuilder, SharedFacesHaveOppositeSigns) {
  for (const auto& [name, m] : mesh_zoo())
    for (int f = 0; f < m.num_faces(); ++f) {
      const auto& refs = m.face_cells(f);
      ASSERT_GE(refs.size(), 1u);
      ASSERT_LE(refs.size(), 2u);
      if (refs.size() == 2) {
        EXPECT_EQ(refs[0].sign, -refs[1].sign) << name;
      }
      EXPECT_EQ(m.is_boundary_face(f), refs.size() == 1) << name;
    }
}

TEST(MeshValidation, ZooIsValid) {
  for (const auto& [name, m] : mesh_zoo()) {
    const auto rep = validate(m);
    EXPECT_TRUE(rep.ok()) << name << ": " << (rep.ok() ? "" : rep.violations.front().detail);
  }
}

// sum_f s_f |f| n_f = 0 for every cell, relative to the surface area.
TEST(MeshValidation, ClosureResidualIsRoundoff) {
  for (const auto& [name, m] : mesh_zoo()) {
    for (int c = 0; c < m.num_cells(); ++c) {
      Vec3 s = Vec3::Zero();
      double area = 0.0;
      for (const auto& sf : m.cell(c).faces) {
        const auto& g = m.face_geometry(sf.index);
        s += sf.sign * g.area * g.normal;
        area += g.area;
      }
      EXPECT_LE(s.norm(), 1e-12 * area) << name << " cell " << c;
    }
  }
}

TEST(MeshValidation, VolumesSumToDomain) {
  const PolyMesh p = generate_perturbed_hex(4, Box{}, 0.25, 3);
  double vol = 0.0;
  for (int c = 0; c < p.num_cells(); ++c) vol += p.cell_geometry(c).volume;
  EXPECT_NEAR(vol, 1.0, 1e-13);
}

TEST(MeshValidation, SimplePolyhedraGeometry) {
  EXPECT_NEAR(testing::tetrahedron().cell_geometry(0).volume, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(testing::pyramid().cell_geometry(0).volume, 1.0 / 3.0, 1e-15);
  // Regular hexagon of circumradius 1, height 1.
  EXPECT_NEAR(testing::hexagonal_prism().cell_geometry(0).volume, 1.5 * std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(testing::l_shaped_prism().cell_geometry(0).volume, 3.0, 1e-14);
  const Vec3 b = testing::tetrahedron().cell_geometry(0).barycenter;
  EXPECT_LT((b - Vec3(0.25, 0.25, 0.25)).norm(), 1e-15);
}

TEST(MeshValidation, DetectsFlippedCell) {
  const PolyMesh good = generate_structured_hex(2);
  std::vector<Cell> cells = good.cells();
  for (auto& sf : cells[3].faces) sf.sign = -sf.sign;
  const PolyMesh bad(good.vertices(), good.edges(), good.faces(), cells);
  const auto rep = validate(bad);
  EXPECT_FALSE(rep.ok());
  EXPECT_TRUE(has_violation(rep, "face_orientation") || has_violation(rep, "cell_volume_positive"));
}

TEST(MeshValidation, DetectsBrokenLoop) {
  const PolyMesh good = generate_structured_hex(1);
  std::vector<Face> faces = good.faces();
  std::swap(faces[0].edges[0], faces[0].edges[1]);
  const PolyMesh bad(good.vertices(), good.edges(), faces, good.cells());
  EXPECT_TRUE(has_violation(validate(bad), "face_loop_closed"));
}

TEST(MeshValidation, DetectsNonPlanarFace) {
  const PolyMesh good = generate_structured_hex(1);
  std::vector<Vec3> v = good.vertices();
  v[7] += Vec3(0.0, 0.0, 0.2);
  const PolyMesh bad(v, good.edges(), good.faces(), good.cells());
  EXPECT_TRUE(has_violation(validate(bad), "face_planar"));
}

TEST(MeshValidation, DetectsMissingFace) {
  const PolyMesh good = generate_structured_hex(1);
  std::vector<Cell> cells = good.cells();
  cells[0].faces.pop_back();
  const PolyMesh bad(good.vertices(), good.edges(), good.faces(), cells);
  const auto rep = validate(bad);
  EXPECT_TRUE(has_violation(rep, "cell_orientation"));
  EXPECT_TRUE(has_violation(rep, "face_cell_count"));
}

TEST(MeshValidation, DetectsDisconnectedCells) {
  PolygonMesh2D two;
  two.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1),
                  Vec2(3, 0), Vec2(4, 0), Vec2(4, 1), Vec2(3, 1)};
  two.polygons = {{0, 1, 2, 3}, {4, 5, 6, 7}};
  EXPECT_TRUE(has_violation(validate(generate_extruded(two, 1, 1.0)), "mesh_connected"));
}

TEST(PerturbedHex, DeterministicForSeed) {
  const PolyMesh a = generate_perturbed_hex(3, Box{}, 0.2, 42);
  const PolyMesh b = generate_perturbed_hex(3, Box{}, 0.2, 42);
  const PolyMesh c = generate_perturbed_hex(3, Box{}, 0.2, 43);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  for (int v = 0; v < a.num_vertices(); ++v) EXPECT_EQ(a.vertex(v), b.vertex(v));
  double diff = 0.0;
  for (int v = 0; v < a.num_vertices(); ++v) diff += (a.vertex(v) - c.vertex(v)).norm();
  EXPECT_GT(diff, 0.0);
}

TEST(PerturbedHex, BoundaryVerticesStayOnBox) {
  const PolyMesh m = generate_perturbed_hex(4, Box{}, 0.3, 5);
  const auto bnd = m.boundary_vertices();
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Vec3& x = m.vertex(v);
    const bool on_box = (x.array() < 1e-15).any() || (x.array() > 1.0 - 1e-15).any();
    EXPECT_EQ(bool(bnd[v]), on_box);
  }
}

TEST(PerturbedHex, DisplacementWithinAmplitude) {
  const int n = 4;
  const double amp = 0.2, h = 1.0 / n;
  const PolyMesh s = generate_structured_hex(n);
  const PolyMesh p = generate_perturbed_hex(n, Box{}, amp, 9);
  for (int v = 0; v < s.num_vertices(); ++v)
    EXPECT_LE((p.vertex(v) - s.vertex(v)).cwiseAbs().maxCoeff(), amp * h + 1e-15);
}

TEST(PerturbedHex, SplitsNonPlanarFacesIntoTriangles) {
  const PolyMesh p = generate_perturbed_hex(3, Box{}, 0.2, 7);
  EXPECT_EQ(p.num_cells(), 27);
  EXPECT_EQ(p.num_faces(), 162);  // each interior quad splits into two triangles
  EXPECT_TRUE(validate(p).ok());
  const PolyMesh flat = generate_perturbed_hex(3, Box{}, 0.0, 7);
  EXPECT_EQ(flat.num_faces(), 108);
}

TEST(PerturbedHex, RejectsAmplitudeOutOfRange) {
  for (double amp : {-0.1, 0.31, 1.0}) {
    try {
      generate_perturbed_hex(3, Box{}, amp, 1);
      FAIL() << "amplitude " << amp << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::PerturbationRejected);
    }
  }
}

TEST(Polygon2D, RejectsDefects) {
  auto rejects = [](PolygonMesh2D m) {
    try {
      validate_polygon_mesh(m);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidPolygon2D;
    }
    return false;
  };
  PolygonMesh2D sq = unit_square_polygon();
  EXPECT_NO_THROW(validate_polygon_mesh(sq));
  PolygonMesh2D cw = sq;
  std::reverse(cw.polygons[0].begin(), cw.polygons[0].end());
  EXPECT_TRUE(rejects(cw));
  PolygonMesh2D bow;
  bow.vertices = {Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)};
  bow.polygons = {{0, 1, 2, 3}};
  EXPECT_TRUE(rejects(bow));
  PolygonMesh2D two;
  two.vertices = {Vec2(0, 0), Vec2(1, 0)};
  two.polygons = {{0, 1}};
  EXPECT_TRUE(rejects(two));
  PolygonMesh2D missing = sq;
  missing.polygons[0].push_back(17);
  EXPECT_TRUE(rejects(missing));
}

TEST(Extrusion, PrismCountsAndVolume) {
  const PolygonMesh2D hex = regular_polygon(6, 1.0);
  const PolyMesh m = generate_extruded(hex, 3, 1.5);
  EXPECT_EQ(m.num_cells(), 3);
  EXPECT_EQ(m.num_vertices(), 24);
  EXPECT_EQ(m.num_faces(), 4 + 3 * 6);
  double vol = 0.0;
  for (int c = 0; c < 3; ++c) {
    vol += m.cell_geometry(c).volume;
    EXPECT_EQ(m.cell(c).faces.size(), 8u);
  }
  EXPECT_NEAR(vol, 1.5 * 1.5 * std::sqrt(3.0), 1e-13);
}

TEST(Extrusion, ClassifierSetsSubdomain) {
  const PolyMesh m = generate_extruded(unit_square_polygon(), std::vector<double>{0.0, 0.5, 1.0, 2.0},
                                       [](const Vec3& c, int) { return c.z() > 0.6 ? 1 : 0; });
  ASSERT_EQ(m.num_cells(), 3);
  EXPECT_EQ(m.cell(0).subdomain, 0);
  EXPECT_EQ(m.cell(1).subdomain, 1);
  EXPECT_EQ(m.cell(2).subdomain, 1);
}

TEST(Honeycomb, HexagonCountsPerRing) {
  for (int rings : {1, 2, 3}) {
    const PolygonMesh2D h = honeycomb(rings, 0.5);
    EXPECT_EQ(static_cast<int>(h.polygons.size()), 3 * rings * (rings - 1) + 1);
    EXPECT_NO_THROW(validate_polygon_mesh(h));
  }
}

TEST(PolarDisk, CoversDiskAreaAndRefinesArcs) {
  const std::vector<double> radii{0.25, 0.5, 0.75, 1.0};
  const PolygonMesh2D d = polar_disk(radii, 6, 1.5);
  EXPECT_NO_THROW(validate_polygon_mesh(d));
  const PolyMesh m = generate_extruded(d, 1, 1.0);
  double vol = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) vol += m.cell_geometry(c).volume;
  // Inscribed polygonal approximation of the unit disk: area below pi,
  // converging to it with the outermost sector count.
  EXPECT_LT(vol, std::numbers::pi);
  EXPECT_GT(vol, 0.97 * std::numbers::pi);
  EXPECT_TRUE(validate(m).ok());
  EXPECT_EQ(d.regions.front(), 0);
  EXPECT_EQ(*std::max_element(d.regions.begin(), d.regions.end()), 3);
}

}  // namespace
}  // namespace magvem
