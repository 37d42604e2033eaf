#pragma once

#include <complex>
#include <vector>

#include "greenlab/geometry.hpp"

namespace greenlab {

/// In-place FFTs on a periodic StructuredGrid. Axis 0 is the fastest-running
/// index (matching StructuredGrid::node). Plans are created at construction;
/// execution is const and safe for concurrent use on distinct buffers.
class GridFFT {
 public:
  explicit GridFFT(const StructuredGrid& grid);
  ~GridFFT();
  GridFFT(const GridFFT&) = delete;
  GridFFT& operator=(const GridFFT&) = delete;

  void forward(std::complex<double>* data) const;
  /// Inverse transform, normalized by 1/N so inverse(forward(x)) == x.
  void inverse(std::complex<double>* data) const;

  /// Angular wavenumber 2*pi*k/L for frequency slot m on the given axis.
  double kappa(int axis, long m) const;
  /// Integer frequency index k in [-N/2, N/2) for slot m.
  long freq_index(int axis, long m) const;
  /// |kappa|^2 of the frequency multi-slot of flat index i.
  double kappa_sq(long flat) const;

  long size() const { return n_; }
  const std::vector<int>& dims() const { return dims_; }

 private:
  std::vector<int> dims_;
  std::vector<double> length_;
  long n_;
  void* plan_fwd_;
  void* plan_inv_;
};

}  // namespace greenlab
