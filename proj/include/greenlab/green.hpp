#pragma once

#include <memory>
#include <string>

#include "greenlab/laplace.hpp"

namespace greenlab {

/// Area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

/// Free-space radial kernel with distributional Laplacian delta_0:
/// phi(r) = ln(r)/2pi for n = 2, -r^{2-n}/((n-2) omega_{n-1}) for n >= 3.
struct FundamentalSolution {
  int n = 2;
  double phi(double r) const;
  double dphi(double r) const;
  /// Flux of grad phi through the sphere of radius r (equals 1 for every r).
  double flux(double r) const { return unit_sphere_area(n) * std::pow(r, n - 1) * dphi(r); }
};

FundamentalSolution fundamental_solution(int n);

/// Closed-form Green function of a catalog geometry, evaluable at arbitrary
/// point pairs. Sign convention: Lap_y G = delta_x (minus 1/|M| when closed).
class GreenOracle {
 public:
  virtual ~GreenOracle() = default;
  virtual double value(const Point& x, const Point& y) const = 0;
  virtual Point grad_y(const Point& x, const Point& y) const = 0;
  /// dG/dnu_y at a boundary point (boundary geometries).
  virtual double poisson(const Point& x, const Point& yb) const;
};

/// Returns the oracle for geometries that have one (disk, ellipse excluded;
/// annulus2d, balls, tori, sphere2 included), else nullptr.
std::unique_ptr<GreenOracle> make_green_oracle(const GeometryHandle& g);

/// One Green column by the corrector split G(x,.) = Phi(|x-.|) - H where H is
/// the discrete harmonic extension of the fundamental-solution trace. Flat
/// boundary geometries only; sidesteps point-source quadrature entirely.
Eigen::VectorXd green_numeric(const DiscreteOperator& op, const Point& x);

/// Poisson kernel samples (one per boundary face) extracted from a Green
/// column by one-sided differencing along the adjacent cell.
Eigen::VectorXd poisson_from_column(const DiscreteOperator& op,
                                    const Eigen::VectorXd& column);

enum class Provenance { analytic, corrector_split };

/// Sampled Green data: values/gradients at every geometry node for each
/// source, plus Poisson-kernel traces on the boundary quadrature.
struct GreenTable {
  const GeometryHandle* geom = nullptr;
  Eigen::MatrixXd sources;          // S x edim
  std::vector<long> source_nodes;   // node id of each source (-1 if free point)
  Eigen::MatrixXd values;           // S x N
  std::vector<Eigen::MatrixXd> gradients;  // per source: N x edim
  Eigen::MatrixXd poisson;          // S x num_boundary_quad
  Provenance provenance = Provenance::analytic;
  double tol = 1e-9;       // tol(h) for the discrete identities
  double err_harm = 0;     // measured harmonic-extension error at this h

  long num_sources() const { return sources.rows(); }
  double value_at(long s, long node) const { return values(s, node); }
};

/// Well-spread deterministic source sample: greedy farthest-point over the
/// geometry nodes, two thirds with boundary distance >= interior_frac * diam
/// and one third graded down to 5h from the boundary (boundary kinds).
Eigen::MatrixXd default_sources(const GeometryHandle& g, int count, unsigned seed,
                                std::vector<long>* node_ids = nullptr);

/// Torus tables come in two flavors: band-limited spectral columns (exact
/// zero mean, for the discrete identities) or pointwise Ewald values (for
/// the uniform-bound sweeps).
enum class TorusTableMode { spectral, ewald };

/// Builds the table with the analytic oracle when available, otherwise with
/// the corrector split (op required in that case). Diagonal entries
/// (source node == target node) are set to 0 and masked downstream.
GreenTable build_green_table(const GeometryHandle& g, const DiscreteOperator* op,
                             const Eigen::MatrixXd& sources,
                             bool want_gradients = true,
                             TorusTableMode torus_mode = TorusTableMode::spectral);

struct GreenInvariantReport {
  double max_positive = 0;     // sign violation (boundary kinds)
  double max_boundary = 0;     // |G| at boundary nodes
  double max_asymmetry = 0;    // over source-node pairs
  double max_mean = 0;         // closed-manifold mean
  double sign_tol = 1e-9;
  double table_tol = 0;
  double mean_tol = 0;
  bool pass() const;
  std::string describe() const;
};

GreenInvariantReport check_green_invariants(const GreenTable& table);

/// CSV matrices plus a JSON manifest (portable, binary-free).
void save_green_table(const GreenTable& table, const std::string& dir);
GreenTable load_green_table(const GeometryHandle& g, const std::string& dir);

}  // namespace greenlab
