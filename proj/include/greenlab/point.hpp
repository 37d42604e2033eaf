#pragma once

#include <Eigen/Dense>

namespace greenlab {

/// Coordinate vector; stack-allocated up to the 4D geometries in the catalog.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

inline Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

inline Point make_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

inline Point make_point(double x, double y, double z, double w) {
  Point p(4);
  p << x, y, z, w;
  return p;
}

}  // namespace greenlab
