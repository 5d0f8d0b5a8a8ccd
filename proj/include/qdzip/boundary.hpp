#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qdzip/geometry.hpp"

namespace qdzip {

// Complex-valued function sampled on the boundary grid of a Domain, one sample
// vector per curve. Spectral operations assume the underlying function is
// smooth and 2pi-periodic per curve; tail_ratio() reports how well the grid
// resolves it.
class BoundaryFunction {
 public:
  BoundaryFunction(const Domain& dom, std::vector<std::vector<cplx>> samples);
  static BoundaryFunction from_callable(const Domain& dom,
                                        const std::function<cplx(cplx)>& f);
  static BoundaryFunction from_param(
      const Domain& dom, const std::function<cplx(int, double, cplx)>& f);
  static BoundaryFunction zeros(const Domain& dom);

  const Domain& domain() const { return *dom_; }
  std::span<const cplx> samples(int k) const { return samples_[k]; }
  cplx sample(int k, int i) const { return samples_[k][i]; }
  std::vector<std::vector<cplx>>& raw() { return samples_; }

  // Fourier coefficients of curve k in signed-frequency order c_m,
  // m = -N/2+1 .. N/2 (stored FFT-style).
  std::vector<cplx> spectrum(int k) const;

  // max over curves of (top-decile coefficient magnitude / peak magnitude);
  // small values mean the grid resolves the function.
  double tail_ratio() const;

  BoundaryFunction derivative_dt() const;          // spectral d/dt per curve
  std::vector<cplx> upsampled(int k, int factor) const;  // trig interpolation
  cplx eval(int k, double t) const;                // trig interpolation at t

  BoundaryFunction conjugated() const;
  BoundaryFunction operator+(const BoundaryFunction& o) const;
  BoundaryFunction operator-(const BoundaryFunction& o) const;
  BoundaryFunction scaled(cplx s) const;

 private:
  const Domain* dom_;
  std::vector<std::vector<cplx>> samples_;
};

// In-place FFT helpers (forward unnormalized, inverse scaled by 1/N).
std::vector<cplx> fft_forward(const std::vector<cplx>& x);
std::vector<cplx> fft_inverse(const std::vector<cplx>& x);

// Trigonometric interpolation of periodic samples to a finer grid (factor a
// power of two); exact for resolved spectra.
std::vector<cplx> fft_upsample(const std::vector<cplx>& x, int factor);

// Signed frequency for FFT bin j of an N-point transform.
inline int fft_freq(int j, int N) { return j <= N / 2 ? j : j - N; }

// Boundary trace of a holomorphic function from an interior evaluator:
// samples eval at z(t_i + i*sigma) (a contour displaced into the domain),
// then undoes the strip shift coefficientwise (factor e^{m*sigma}).
// Amplification e^{N*sigma/2} is the caller's stability budget.
std::vector<cplx> lift_holomorphic_trace(const Curve& c, int N, double sigma,
                                         const std::function<cplx(cplx)>& eval);

}  // namespace qdzip
