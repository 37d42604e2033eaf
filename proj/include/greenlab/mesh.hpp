#pragma once

#include <array>
#include <vector>

#include "greenlab/point.hpp"

namespace greenlab {

/// One boundary facet (edge in 2D, triangle in 3D) with its outward normal.
struct BoundaryFace {
  std::array<int, 3> verts{-1, -1, -1};
  int nverts = 0;
  int cell = -1;  // the unique adjacent cell
  Point normal;   // outward, unit length
  double area = 0.0;
  Point centroid;
};

/// Simplicial mesh: triangles in the plane, tets in space, or a triangulated
/// surface embedded in R^3 (sphere catalog entry).
struct Mesh {
  int dim = 2;   // simplex dimension
  int edim = 2;  // embedding dimension
  Eigen::MatrixXd vertices;  // N x edim
  Eigen::MatrixXi cells;     // M x (dim+1)
  std::vector<BoundaryFace> boundary_faces;
  std::vector<int> boundary_vertices;  // sorted, unique
  std::vector<char> is_boundary_vertex;

  double h = 0.0;  // max cell diameter
  Eigen::VectorXd cell_volumes;
  Eigen::VectorXd vertex_weights;           // lumped volume measure
  Eigen::VectorXd boundary_vertex_weights;  // lumped surface measure

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_cells() const { return static_cast<int>(cells.rows()); }
  Point vertex(int i) const { return vertices.row(i).transpose(); }

  double volume() const { return cell_volumes.sum(); }
  double boundary_area() const;

  /// Orients cells positively, extracts boundary facets and normals, and
  /// computes volumes, lumped weights and h. Throws on degenerate cells.
  void finalize();
};

// Catalog generators. `h` is the target edge length.
Mesh make_disk_mesh(double radius, double h);
Mesh make_ellipse_mesh(double a, double b, double h);
Mesh make_annulus_mesh(double inner, double outer, double h);
/// Annulus with explicit radial break points (used by the gradient-scaling
/// study, which needs boundary-layer grading near the inner rim).
Mesh make_annulus_mesh_graded(const std::vector<double>& radii, int angular);
Mesh make_ball3_mesh(double radius, double h);
/// Spherical shell in R^3 between the given radii (graded layers allowed).
Mesh make_shell3_mesh(const std::vector<double>& radii, int subdiv);
Mesh make_sphere2_mesh(double radius, double h);

}  // namespace greenlab
