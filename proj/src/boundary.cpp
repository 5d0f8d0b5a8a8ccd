#include "qdzip/boundary.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

namespace qdzip {

namespace {
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace

std::vector<cplx> fft_forward(const std::vector<cplx>& x) {
  std::vector<cplx> out(x.size());
  fft_engine().fwd(out, x);
  return out;
}

std::vector<cplx> fft_inverse(const std::vector<cplx>& x) {
  std::vector<cplx> out(x.size());
  fft_engine().inv(out, x);
  return out;
}

std::vector<cplx> fft_upsample(const std::vector<cplx>& x, int factor) {
  if (factor <= 1) return x;
  const int n = static_cast<int>(x.size());
  const int m = n * factor;
  std::vector<cplx> spec = fft_forward(x);
  std::vector<cplx> big(m, 0.0);
  for (int j = 0; j < n; ++j) {
    int f = fft_freq(j, n);
    // Split the Nyquist bin symmetrically to keep the interpolant bounded.
    if (2 * j == n) {
      big[static_cast<std::size_t>(f + (f < 0 ? m : 0))] += 0.5 * spec[j];
      big[static_cast<std::size_t>(-f + m) % m] += 0.5 * spec[j];
    } else {
      big[static_cast<std::size_t>(f + (f < 0 ? m : 0))] = spec[j];
    }
  }
  std::vector<cplx> out = fft_inverse(big);
  for (auto& v : out) v *= factor;  // inverse is scaled by 1/m, samples by 1/n
  return out;
}

BoundaryFunction::BoundaryFunction(const Domain& dom,
                                   std::vector<std::vector<cplx>> samples)
    : dom_(&dom), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != dom.connectivity())
    throw ConstructionError("boundary function: wrong curve count");
  for (const auto& s : samples_)
    if (static_cast<int>(s.size()) != dom.grid())
      throw ConstructionError("boundary function: wrong sample count");
}

BoundaryFunction BoundaryFunction::from_callable(
    const Domain& dom, const std::function<cplx(cplx)>& f) {
  std::vector<std::vector<cplx>> s(dom.connectivity());
  for (int k = 0; k < dom.connectivity(); ++k) {
    s[k].resize(dom.grid());
    for (int i = 0; i < dom.grid(); ++i) s[k][i] = f(dom.points(k)[i]);
  }
  return BoundaryFunction(dom, std::move(s));
}

BoundaryFunction BoundaryFunction::from_param(
    const Domain& dom, const std::function<cplx(int, double, cplx)>& f) {
  std::vector<std::vector<cplx>> s(dom.connectivity());
  for (int k = 0; k < dom.connectivity(); ++k) {
    s[k].resize(dom.grid());
    for (int i = 0; i < dom.grid(); ++i)
      s[k][i] = f(k, TWO_PI * i / dom.grid(), dom.points(k)[i]);
  }
  return BoundaryFunction(dom, std::move(s));
}

BoundaryFunction BoundaryFunction::zeros(const Domain& dom) {
  return BoundaryFunction(
      dom, std::vector<std::vector<cplx>>(dom.connectivity(),
                                          std::vector<cplx>(dom.grid(), 0.0)));
}

std::vector<cplx> BoundaryFunction::spectrum(int k) const {
  std::vector<cplx> s = fft_forward(samples_[k]);
  const double inv = 1.0 / static_cast<double>(s.size());
  for (auto& v : s) v *= inv;
  return s;
}

double BoundaryFunction::tail_ratio() const {
  double worst = 0;
  for (int k = 0; k < dom_->connectivity(); ++k) {
    auto spec = spectrum(k);
    const int n = static_cast<int>(spec.size());
    double peak = 0, tail = 0;
    for (int j = 0; j < n; ++j) {
      double a = std::abs(spec[j]);
      peak = std::max(peak, a);
      if (std::abs(fft_freq(j, n)) >= (9 * n) / 20) tail = std::max(tail, a);
    }
    if (peak > 0) worst = std::max(worst, tail / peak);
  }
  return worst;
}

BoundaryFunction BoundaryFunction::derivative_dt() const {
  std::vector<std::vector<cplx>> out(samples_.size());
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    std::vector<cplx> spec = fft_forward(samples_[k]);
    const int n = static_cast<int>(spec.size());
    for (int j = 0; j < n; ++j) {
      if (2 * j == n) {
        spec[j] = 0;  // Nyquist derivative is dropped by convention
      } else {
        spec[j] *= cplx(0, fft_freq(j, n));
      }
    }
    out[k] = fft_inverse(spec);
  }
  return BoundaryFunction(*dom_, std::move(out));
}

std::vector<cplx> BoundaryFunction::upsampled(int k, int factor) const {
  return fft_upsample(samples_[k], factor);
}

cplx BoundaryFunction::eval(int k, double t) const {
  auto spec = spectrum(k);
  const int n = static_cast<int>(spec.size());
  cplx acc = 0;
  for (int j = 0; j < n; ++j) {
    int m = fft_freq(j, n);
    if (2 * j == n) {
      acc += spec[j] * std::cos(0.5 * n * t);
    } else {
      acc += spec[j] * std::exp(cplx(0, m * t));
    }
  }
  return acc;
}

BoundaryFunction BoundaryFunction::conjugated() const {
  auto s = samples_;
  for (auto& row : s)
    for (auto& v : row) v = std::conj(v);
  return BoundaryFunction(*dom_, std::move(s));
}

BoundaryFunction BoundaryFunction::operator+(const BoundaryFunction& o) const {
  auto s = samples_;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t i = 0; i < s[k].size(); ++i) s[k][i] += o.samples_[k][i];
  return BoundaryFunction(*dom_, std::move(s));
}

BoundaryFunction BoundaryFunction::operator-(const BoundaryFunction& o) const {
  auto s = samples_;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t i = 0; i < s[k].size(); ++i) s[k][i] -= o.samples_[k][i];
  return BoundaryFunction(*dom_, std::move(s));
}

BoundaryFunction BoundaryFunction::scaled(cplx sfac) const {
  auto s = samples_;
  for (auto& row : s)
    for (auto& v : row) v *= sfac;
  return BoundaryFunction(*dom_, std::move(s));
}

std::vector<cplx> lift_holomorphic_trace(const Curve& c, int N, double sigma,
                                         const std::function<cplx(cplx)>& eval) {
  std::vector<cplx> shifted(N);
  for (int i = 0; i < N; ++i)
    shifted[i] = eval(c.point(cplx(TWO_PI * i / N, sigma)));
  std::vector<cplx> spec = fft_forward(shifted);
  for (int j = 0; j < N; ++j) {
    if (2 * j == N) {
      spec[j] = 0;  // Nyquist bin carries only noise after amplification
    } else {
      spec[j] *= std::exp(sigma * fft_freq(j, N));
    }
  }
  return fft_inverse(spec);
}

}  // namespace qdzip
