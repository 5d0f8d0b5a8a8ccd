#pragma once

#include "qdzip/harmonic.hpp"
#include "qdzip/kernels.hpp"

namespace qdzip {

// Bergman kernel assembled from the Szego kernel and the harmonic-measure
// derivative fields: K(z,w) = 4pi S(z,w)^2 + sum_ij A_ij F_i'(z) conj(F_j'(w)).
// The coupling matrix A is Hermitian; it is determined by applying the
// reproducing property to each F_k' and collapsing the w-dependence by least
// squares over scattered interior samples.
class BergmanKernel {
 public:
  explicit BergmanKernel(const KernelSolver& solver, unsigned threads = 1);

  const Domain& domain() const { return *dom_; }
  cplx eval(cplx z, cplx w) const;

  // As eval, but z may sit arbitrarily close to the boundary: inside a thin
  // collar the value is taken from the boundary trace at the nearest curve
  // point (K(., w) extends continuously to the closure).
  cplx eval_robust(cplx z, cplx w) const;

  const Eigen::MatrixXcd& coupling() const { return a_; }
  const Eigen::MatrixXd& periods() const { return p_; }
  double coupling_asymmetry() const { return asym_; }
  double collapse_residual() const { return collapse_residual_; }

  int field_count() const { return static_cast<int>(fields_.size()); }
  const FPrimeField& f_prime_field(int k) const { return fields_[k]; }
  cplx f_prime(int k, cplx z) const { return fields_[k].eval(z); }

 private:
  const Domain* dom_;
  const KernelSolver* solver_;
  std::vector<HarmonicField> measures_;
  std::vector<FPrimeField> fields_;
  Eigen::MatrixXd p_;
  Eigen::MatrixXcd a_;
  double asym_ = 0, collapse_residual_ = 0, collar_ = 0;
};

// |∫_Ω f(z) conj(K(z,w)) dA(z) − f(w)| / max(1, |f(w)|) by midpoint quadrature
// on an inside-tested bounding-box lattice (grid x grid cells). f is a
// polynomial given by ascending coefficients. Verification only; accuracy is
// limited by the 2D lattice, not by the kernel.
double reproducing_residual(const BergmanKernel& kernel, const std::vector<cplx>& poly,
                            cplx w, int grid = 400, unsigned threads = 1);

}  // namespace qdzip
