#include "greenlab/fft.hpp"

#include <fftw3.h>

namespace greenlab {

GridFFT::GridFFT(const StructuredGrid& grid) {
  dims_.assign(grid.dims.begin(), grid.dims.end());
  length_.resize(dims_.size());
  n_ = 1;
  for (size_t d = 0; d < dims_.size(); ++d) {
    length_[d] = grid.dims[d] * grid.spacing[d];
    n_ *= dims_[d];
  }
  // FFTW is row-major (last index fastest); our axis 0 is fastest, so the
  // dimension list is reversed.
  std::vector<int> rev(dims_.rbegin(), dims_.rend());
  std::vector<std::complex<double>> tmp(n_);
  auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
  plan_fwd_ = fftw_plan_dft(static_cast<int>(rev.size()), rev.data(), buf, buf,
                            FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_inv_ = fftw_plan_dft(static_cast<int>(rev.size()), rev.data(), buf, buf,
                            FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

GridFFT::~GridFFT() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void GridFFT::forward(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
}

void GridFFT::inverse(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_inv_), buf, buf);
  double s = 1.0 / n_;
  for (long i = 0; i < n_; ++i) data[i] *= s;
}

long GridFFT::freq_index(int axis, long m) const {
  int N = dims_[axis];
  return m <= (N - 1) / 2 ? m : m - N;
}

double GridFFT::kappa(int axis, long m) const {
  return 2 * M_PI * freq_index(axis, m) / length_[axis];
}

double GridFFT::kappa_sq(long flat) const {
  double s = 0;
  for (size_t d = 0; d < dims_.size(); ++d) {
    long m = flat % dims_[d];
    flat /= dims_[d];
    double k = kappa(static_cast<int>(d), m);
    s += k * k;
  }
  return s;
}

}  // namespace greenlab
