#include "greenlab/quasirandom.hpp"

#include <cmath>

namespace greenlab {

double radical_inverse(long index, int base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

static const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

Eigen::MatrixXd halton(long count, int d, long skip) {
  Eigen::MatrixXd pts(count, d);
  for (long i = 0; i < count; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = radical_inverse(skip + i + 1, kPrimes[j]);
  return pts;
}

Eigen::MatrixXd halton_ball(long count, int dim, double radius) {
  Eigen::MatrixXd pts(count, dim);
  long got = 0, idx = 1;
  while (got < count) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j)
      x[j] = (2 * radical_inverse(idx, kPrimes[j]) - 1) * radius;
    ++idx;
    if (x.norm() < radius) pts.row(got++) = x;
  }
  return pts;
}

Eigen::MatrixXd halton_sphere(long count, int dim) {
  int pairs = (dim + 1) / 2;
  Eigen::MatrixXd pts(count, dim);
  for (long i = 0; i < count; ++i) {
    Eigen::VectorXd g(2 * pairs);
    for (int p = 0; p < pairs; ++p) {
      double u1 = radical_inverse(i + 1, kPrimes[2 * p]);
      double u2 = radical_inverse(i + 1, kPrimes[2 * p + 1]);
      u1 = std::max(u1, 1e-16);
      double rho = std::sqrt(-2.0 * std::log(u1));
      g[2 * p] = rho * std::cos(2 * M_PI * u2);
      g[2 * p + 1] = rho * std::sin(2 * M_PI * u2);
    }
    Eigen::VectorXd v = g.head(dim);
    double n = v.norm();
    pts.row(i) = (n > 0 ? (v / n).eval() : Eigen::VectorXd::Unit(dim, 0).eval());
  }
  return pts;
}

}  // namespace greenlab
