#pragma once

#include <Eigen/Dense>

namespace greenlab {

/// Van der Corput radical inverse in the given base (index is 1-based).
double radical_inverse(long index, int base);

/// Halton points in [0,1)^d using the first d primes, rows = points.
Eigen::MatrixXd halton(long count, int d, long skip = 0);

/// Low-discrepancy points inside the ball |x| <= radius in R^dim
/// (rejection from the bounding cube; deterministic).
Eigen::MatrixXd halton_ball(long count, int dim, double radius);

/// Low-discrepancy points on the unit sphere S^{dim-1} (Box-Muller on
/// Halton pairs, normalized; deterministic).
Eigen::MatrixXd halton_sphere(long count, int dim);

}  // namespace greenlab
