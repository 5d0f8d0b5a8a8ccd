#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "qdzip/quadrature.hpp"

namespace qdzip {

// Discretized boundary integral operator I + A of the second-kind equation for
// the Szego kernel. Nodes are the domain grid on every curve; the system is
// symmetrized by sqrt of the arc-length weights, which keeps the A block
// skew-Hermitian to machine precision. Dense LU, factored once.
class KSOperator {
 public:
  explicit KSOperator(const Domain& dom, unsigned threads = 1);

  const Domain& domain() const { return *dom_; }
  double skew_residual() const { return skew_residual_; }
  double condition_estimate() const { return cond_estimate_; }

  // Solves (I + A)x = rhs in function space; rhs holds plain samples.
  BoundaryFunction solve(const BoundaryFunction& rhs) const;

 private:
  const Domain* dom_;
  Eigen::MatrixXcd m_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  std::vector<double> sqrtw_;
  double skew_residual_ = 0, cond_estimate_ = 0;
};

// Szego kernel S(., a): boundary trace plus Cauchy-integral interior
// evaluator. S(a, a) is real and positive; construction rejects base points
// where the solve degrades.
class SzegoField {
 public:
  using DerivativeSource = std::function<const BoundaryFunction&(int)>;

  // deriv_source, when given, supplies the trace of (d/d conj(w))^m S(., w) at
  // w = base; solver-built fields wire it to the solver, which must then
  // outlive the field (the same rule as for the domain).
  SzegoField(const Domain& dom, cplx a, BoundaryFunction trace,
             DerivativeSource deriv_source = nullptr);
  cplx base() const { return a_; }
  const BoundaryFunction& trace() const { return trace_; }
  cplx eval(cplx z) const;              // interior only
  // (d/d conj(w))^m S(z, w) at w = base; m >= 1 needs a derivative source.
  cplx eval_derivative(cplx z, int m) const;
  double at_base() const;               // S(a,a)
 private:
  const Domain* dom_;
  cplx a_;
  BoundaryFunction trace_;
  DerivativeSource deriv_source_;
};

// Garabedian kernel L(., a) = i * conj(S(., a)) * conj(T) on the boundary;
// interior evaluator splits off the exact simple pole 1/(2pi(z-a)).
class GarabedianField {
 public:
  GarabedianField(const SzegoField& s);
  cplx base() const { return a_; }
  const BoundaryFunction& trace() const { return trace_; }
  const BoundaryFunction& regular_trace() const { return regular_; }
  cplx eval(cplx z) const;  // interior, z != a
  double min_boundary_modulus() const;
 private:
  const Domain* dom_;
  cplx a_;
  BoundaryFunction trace_;    // full trace including the pole
  BoundaryFunction regular_;  // trace minus 1/(2pi(z-a))
};

// Ahlfors map f_a = S(., a)/L(., a): unimodular boundary trace, f_a(a) = 0,
// f_a'(a) = 2*pi*S(a,a) > 0, proper of degree n.
class AhlforsMap {
 public:
  AhlforsMap(const SzegoField& s, const GarabedianField& l);
  cplx base() const { return a_; }
  const BoundaryFunction& trace() const { return trace_; }
  cplx eval(cplx z) const;
  cplx derivative_at_base() const;
  double max_modulus_defect() const;  // max | |f|-1 | on the grid
  int boundary_winding() const;       // total winding of the trace
 private:
  const Domain* dom_;
  cplx a_;
  BoundaryFunction trace_;
};

// One factorization per domain; one solve per distinct (w, m), memoized.
// Thread-safe for concurrent trace requests.
class KernelSolver {
 public:
  explicit KernelSolver(const Domain& dom, unsigned threads = 1);

  const Domain& domain() const { return *dom_; }
  const KSOperator& op() const { return ks_; }

  // Trace of (d/d conj(w))^m S(., w).
  const BoundaryFunction& szego_trace(cplx w, int m = 0) const;

  SzegoField szego(cplx a) const;
  GarabedianField garabedian(cplx a) const;
  AhlforsMap ahlfors(cplx a) const;

  // The n-1 zeros of S(., a) in the domain; count cross-checked against the
  // boundary winding of the trace.
  std::vector<cplx> szego_zeros(cplx a) const;

 private:
  const Domain* dom_;
  KSOperator ks_;
  mutable std::map<std::tuple<double, double, int>, std::unique_ptr<BoundaryFunction>> memo_;
  mutable std::mutex mu_;
};

// Winding number of a nonvanishing boundary trace, summed over curves.
int trace_winding(const BoundaryFunction& f);

}  // namespace qdzip
