#pragma once

#include <Eigen/Dense>

#include "qdzip/quadrature.hpp"

namespace qdzip {

// Real harmonic function represented as the real part of a Cauchy integral of
// a real double-layer density plus logarithmic sources anchored inside the
// holes. u(z) = Re[(1/2pi i) contour integral of mu/(zeta - z)] + sum q_l ln|z - s_l|.
class HarmonicField {
 public:
  HarmonicField(const Domain& dom, BoundaryFunction density,
                std::vector<double> charges, std::vector<cplx> sources);

  double eval(cplx z) const;  // interior
  const BoundaryFunction& density() const { return density_; }
  const std::vector<double>& charges() const { return charges_; }
  const std::vector<cplx>& sources() const { return sources_; }

 private:
  const Domain* dom_;
  BoundaryFunction density_;
  std::vector<double> charges_;
  std::vector<cplx> sources_;
};

// Second-kind double-layer Dirichlet solver. The plain double layer is rank
// deficient on multiply connected domains; one log source per inner curve
// (anchored at the curve's sample centroid, inside the hole) plus zero-mean
// density constraints complete the system. Real dense LU, factored once.
class DirichletSolver {
 public:
  explicit DirichletSolver(const Domain& dom, unsigned threads = 1);

  const Domain& domain() const { return *dom_; }

  // boundary_data[k][i] = value on curve k at node i.
  HarmonicField solve(const std::vector<std::vector<double>>& boundary_data) const;

  // Harmonic measure of inner curve k (0-based; data 1 there, 0 elsewhere).
  HarmonicField measure(int inner_k) const;

 private:
  const Domain* dom_;
  std::vector<cplx> sources_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// The holomorphic derivative field 2 * d(u)/dz of a harmonic field:
// (1/2pi i) contour integral of mu/(zeta - z)^2 plus sum q_l/(z - s_l).
// The kernel is differentiated, not the density. The boundary trace is
// recovered from an inward-displaced contour (strip shift undone in Fourier
// space), so no singular evaluation happens on the curve itself.
class FPrimeField {
 public:
  FPrimeField(const Domain& dom, const HarmonicField& h, int index);

  int index() const { return index_; }
  cplx eval(cplx z) const;  // interior
  const BoundaryFunction& trace() const { return trace_; }

 private:
  const Domain* dom_;
  const HarmonicField* field_;
  int index_;
  BoundaryFunction trace_;
};

// P_ki = (1/i) * contour integral of F_k' over inner curve i (as stored,
// clockwise). The double-layer part of F' integrates to zero over any closed
// contour (exact antiderivative), so the periods reduce to the log-source
// strengths: P_ki = -2pi * q_i of measure k. Residual against symmetry is
// checked, then the symmetric part is returned.
Eigen::MatrixXd period_matrix(const Domain& dom,
                              const std::vector<HarmonicField>& measures);

}  // namespace qdzip
