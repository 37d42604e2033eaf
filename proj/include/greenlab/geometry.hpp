#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenlab/mesh.hpp"
#include "greenlab/point.hpp"

namespace greenlab {

enum class GeomKind { disk, ellipse, annulus2d, ball3, ball4, torus2, torus3, sphere2 };

std::string kind_name(GeomKind k);
GeomKind kind_from_name(const std::string& name);

struct GeometrySpec {
  GeomKind kind = GeomKind::disk;
  std::vector<double> params;  // disk/balls: radius; ellipse/annulus: two radii; tori: side
  double h = 0.1;              // mesh resolution (meshed kinds)
  int grid_n = 64;             // nodes per axis (periodic kinds)
  int samples = 200000;        // volume sample count (ball4)

  std::string summary() const;
};

/// Uniform axis-aligned periodic grid (flat tori and C^n sampling).
struct StructuredGrid {
  std::vector<int> dims;
  std::vector<double> spacing;
  std::vector<bool> periodic;

  int rank() const { return static_cast<int>(dims.size()); }
  long num_nodes() const {
    long n = 1;
    for (int d : dims) n *= d;
    return n;
  }
  double node_volume() const {
    double v = 1;
    for (double s : spacing) v *= s;
    return v;
  }
  Point node(long i) const;
  long wrap_index(const std::vector<long>& multi) const;
};

/// A catalog geometry: the manifold, its discretization, and the exact
/// distance functions the estimates are measured against.
class GeometryHandle {
 public:
  GeometrySpec spec;
  int dim = 2;   // manifold dimension n
  int edim = 2;  // coordinate dimension
  bool has_boundary = true;

  std::optional<Mesh> mesh;
  std::optional<StructuredGrid> grid;

  // ball4: quasi-random volume/boundary samples instead of a mesh.
  Eigen::MatrixXd sample_points;
  Eigen::VectorXd sample_weights;
  Eigen::MatrixXd boundary_samples;
  Eigen::VectorXd boundary_sample_weights;
  Eigen::MatrixXd boundary_sample_normals;

  double volume() const;
  double boundary_area() const;
  double resolution() const;  // h for meshes, spacing for grids, N^{-1/4} scale for ball4

  /// Geodesic distance between two points of the geometry.
  double distance(const Point& x, const Point& y) const;
  /// Distance to the boundary (closed kinds throw).
  double boundary_distance(const Point& x) const;
  bool contains(const Point& x, double tol = 1e-9) const;

  // Unified quadrature view over the volume nodes.
  long num_nodes() const;
  Point node(long i) const;
  double node_weight(long i) const;
  bool node_on_boundary(long i) const;

  // Boundary quadrature view (faces for meshes, samples for ball4).
  long num_boundary_quad() const;
  Point boundary_quad_point(long i) const;
  double boundary_quad_weight(long i) const;
  Point boundary_quad_normal(long i) const;

  double closed_form_volume() const;
  double closed_form_boundary_area() const;
};

/// Builds a catalog geometry. Rejects unknown kinds and non-smooth requests.
GeometryHandle build_geometry(const GeometrySpec& spec);

class geometry_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace greenlab
