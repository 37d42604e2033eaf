#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <complex>
#include <functional>
#include <memory>

#include "greenlab/fft.hpp"
#include "greenlab/geometry.hpp"

namespace greenlab {

/// Nodal scalar function on a geometry's quadrature nodes.
struct DiscreteFunction {
  const GeometryHandle* geom = nullptr;
  Eigen::VectorXcd values;

  static DiscreteFunction zeros(const GeometryHandle& g);
  static DiscreteFunction sample(const GeometryHandle& g,
                                 const std::function<std::complex<double>(const Point&)>& f);
  void check_finite() const;  // throws on NaN/Inf
  DiscreteFunction real_part() const;
  std::complex<double> average() const;  // volume average
};

/// Vector field, cellwise-constant on meshes, nodal on grids.
/// Columns are coordinate components (edim for meshes, dim for grids).
struct VectorField {
  const GeometryHandle* geom = nullptr;
  bool cellwise = true;
  Eigen::MatrixXcd values;
};

enum class Region { interior, boundary };

/// Discrete Laplace machinery: piecewise-linear FEM on meshes (cotangent
/// weights on the sphere surface mesh), exact Fourier symbol on periodic
/// grids. Immutable after assemble(); the Dirichlet factorization is shared
/// and read-only, so concurrent solves are safe.
class DiscreteOperator {
 public:
  const GeometryHandle* geom = nullptr;
  enum class Kind { fem, spectral } kind = Kind::fem;

  // FEM data
  Eigen::SparseMatrix<double> stiffness;  // all vertices, symmetric
  Eigen::VectorXd lumped_mass;
  std::vector<int> interior;             // interior vertex ids
  std::vector<int> interior_pos;         // vertex id -> position in `interior`, or -1
  Eigen::SparseMatrix<double> K_II, K_IB;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor;
  std::vector<Eigen::MatrixXd> grad_lambda;  // per cell: (dim+1) x edim

  // spectral data
  std::shared_ptr<GridFFT> fft;

  bool is_spectral() const { return kind == Kind::spectral; }
};

DiscreteOperator assemble(const GeometryHandle& g);

/// Solves  Lap u = rhs in the interior, u = boundary_data on the boundary.
/// boundary_data/rhs are full nodal vectors (non-boundary entries of
/// boundary_data and boundary entries of rhs are ignored).
DiscreteFunction solve_dirichlet(const DiscreteOperator& op,
                                 const DiscreteFunction& boundary_data,
                                 const DiscreteFunction& rhs);

/// Real-valued convenience overload used by the Green corrector split.
Eigen::VectorXd solve_dirichlet_real(const DiscreteOperator& op,
                                     const Eigen::VectorXd& boundary_values,
                                     const Eigen::VectorXd& rhs);

VectorField gradient(const DiscreteOperator& op, const DiscreteFunction& f);

/// Nodal weak Laplacian -M^{-1} K f on meshes (interior rows meaningful),
/// exact spectral Laplacian on grids.
DiscreteFunction laplacian(const DiscreteOperator& op, const DiscreteFunction& f);

double lp_norm(const DiscreteFunction& f, double p, Region region = Region::interior);
double lp_norm(const VectorField& v, double p, Region region = Region::interior);

/// Smallest nonzero eigenvalue of -Lap on a closed geometry (mean-zero
/// functions); exact Fourier symbol on grids, shift-inverted iteration with
/// deflation of constants on meshes. Relative residual <= 1e-8.
double first_nonzero_eigenvalue(const DiscreteOperator& op);

/// |int <grad s1, s2> + int s1 div s2 - bdry int s1 (s2.nu)| on a mesh.
double discrete_stokes_residual(const GeometryHandle& g, const DiscreteFunction& s1,
                                const VectorField& s2_nodal);

}  // namespace greenlab
