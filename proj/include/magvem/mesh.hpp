// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

// Oriented polyhedral mesh: vertices, globally oriented edges, faces as
// signed edge loops and cells as signed face sets, plus the geometric
// quantities (areas, normals, barycenters, diameters, volumes) the
// lowest-order virtual element spaces need.

#ifndef MAGVEM_MESH_HPP
#define MAGVEM_MESH_HPP

#include <Eigen/Dense>

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace magvem {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Index into an entity list together with a relative orientation (+1/-1).
struct SignedIndex {
  int index = 0;
  int sign = 1;

  friend bool operator==(const SignedIndex&, const SignedIndex&) = default;
};

/// Edge oriented from tail to head; canonical meshes have tail < head.
struct Edge {
  int tail = 0;
  int head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Closed loop of edges. sign = +1 when the edge direction agrees with the
/// loop, which runs counterclockwise as seen from the face normal.
struct Face {
  std::vector<SignedIndex> edges;

  friend bool operator==(const Face&, const Face&) = default;
};

/// sign = +1 when the face normal points out of the cell.
struct Cell {
  std::vector<SignedIndex> faces;
  int subdomain = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct FaceGeometry {
  std::vector<int> loop;  ///< start vertex of each loop edge, in loop order
  double area = 0.0;
  Vec3 normal = Vec3::Zero();      ///< unit, Newell's formula
  Vec3 barycenter = Vec3::Zero();
  double diameter = 0.0;
};

struct CellGeometry {
  std::vector<int> vertices;  ///< sorted, unique
  std::vector<int> edges;     ///< sorted, unique
  double volume = 0.0;
  Vec3 barycenter = Vec3::Zero();
  double diameter = 0.0;  ///< max vertex-pair distance
};

class PolyMesh {
 public:
  PolyMesh() = default;

  /// Builds the mesh and its geometry. Topology is not validated here; see
  /// validate(). An empty `boundary_faces` vector means "derive from the
  /// number of cells referencing each face".
  PolyMesh(std::vector<Vec3> vertices, std::vector<Edge> edges,
           std::vector<Face> faces, std::vector<Cell> cells,
           std::vector<bool> boundary_faces = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<bool>& boundary_faces() const { return boundary_faces_; }

  const Vec3& vertex(int v) const { return vertices_[v]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const Face& face(int f) const { return faces_[f]; }
  const Cell& cell(int c) const { return cells_[c]; }
  bool is_boundary_face(int f) const { return boundary_faces_[f]; }

  double edge_length(int e) const { return edge_lengths_[e]; }
  /// Unit vector from tail to head.
  const Vec3& edge_tangent(int e) const { return edge_tangents_[e]; }
  Vec3 edge_midpoint(int e) const {
    return 0.5 * (vertices_[edges_[e].tail] + vertices_[edges_[e].head]);
  }
  const FaceGeometry& face_geometry(int f) const { return face_geometry_[f]; }
  const CellGeometry& cell_geometry(int c) const { return cell_geometry_[c]; }

  /// Cells referencing face f, with the sign each one carries.
  const std::vector<SignedIndex>& face_cells(int f) const { return face_cells_[f]; }

  /// Per-entity boundary markers derived from boundary faces.
  std::vector<bool> boundary_edges() const;
  std::vector<bool> boundary_vertices() const;

  /// Mean cell diameter, (1/N_P) sum h_P.
  double mean_cell_diameter() const;

  friend bool operator==(const PolyMesh& a, const PolyMesh& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_ &&
           a.faces_ == b.faces_ && a.cells_ == b.cells_ &&
           a.boundary_faces_ == b.boundary_faces_;
  }

 private:
  void compute_geometry();

  std::vector<Vec3> vertices_;
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  std::vector<Cell> cells_;
  std::vector<bool> boundary_faces_;

  std::vector<double> edge_lengths_;
  std::vector<Vec3> edge_tangents_;
  std::vector<FaceGeometry> face_geometry_;
  std::vector<CellGeometry> cell_geometry_;
  std::vector<std::vector<SignedIndex>> face_cells_;
};

/// Assembles a PolyMesh from cells described as outward vertex loops (the
/// VTK polyhedron convention). Faces are deduplicated by vertex set and edges
/// are oriented tail < head.
class MeshBuilder {
 public:
  explicit MeshBuilder(std::vector<Vec3> vertices);

  void add_cell(const std::vector<std::vector<int>>& outward_loops, int subdomain = 0);
  PolyMesh build() &&;

 private:
  int find_or_add_edge(int a, int b);

  std::vector<Vec3> vertices_;
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> face_loops_;
  std::vector<Cell> cells_;
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& k) const noexcept;
  };
  struct PairHash {
    std::size_t operator()(const std::pair<int, int>& k) const noexcept;
  };
  std::unordered_map<std::vector<int>, int, KeyHash> face_index_;
  std::unordered_map<std::pair<int, int>, int, PairHash> edge_index_;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string invariant;
  std::string detail;
};

struct CellQuality {
  double diameter = 0.0;
  double min_edge_ratio = 0.0;       ///< min |e| / h_P
  double min_face_diameter_ratio = 0.0;
  double max_planarity_residual = 0.0;  ///< max over faces, relative to h_f
  double inner_radius_ratio = 0.0;      ///< min face-plane distance from b_P / h_P
  bool star_shaped_heuristic = false;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<CellQuality> cells;
  double max_closure_residual = 0.0;  ///< max |sum s_f |f| n_f| / |dP|

  bool ok() const { return violations.empty(); }
};

inline constexpr double kPlanarityTolerance = 1e-9;

ValidationReport validate(const PolyMesh& mesh);

}  // namespace magvem

#endif  // MAGVEM_MESH_HPP
