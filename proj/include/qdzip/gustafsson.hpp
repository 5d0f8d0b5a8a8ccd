#pragma once

#include <memory>
#include <optional>

#include "qdzip/kernels.hpp"

namespace qdzip {

struct FitOptions {
  double tol = 1e-8;         // relative residual target in the weighted norm
  int max_terms = 160;
  double deriv_weight = 1.0; // weight of the first-derivative block of the norm
  int lattice = 28;          // candidate lattice resolution across the bounding box
  int cluster_rings = 6;     // polar candidate layout for the confined variant
  int cluster_angles = 12;
  double svd_cutoff = 1e-13; // truncated-spectrum regularization threshold
};

// Result of the greedy boundary fit of sum_j c_j S(., b_j) to a target trace
// in the value-plus-derivative weighted norm. history is the residual after
// each greedy step; it is nonincreasing by construction.
struct SzegoFit {
  std::vector<cplx> points;
  std::vector<cplx> coeffs;
  double residual = 0;
  std::vector<double> history;
};

// Finite sum of simple poles plus a holomorphic remainder known by trace.
struct PoleSum {
  std::vector<cplx> poles;
  std::vector<cplx> residues;
  BoundaryFunction regular;

  cplx eval(cplx z) const;
};

// Holomorphic map g, C1-close to the identity, whose image is an exact
// quadrature domain. Two construction variants: "scattered" lets the density
// points b_j land anywhere in the domain (the reflected extension then has
// poles at the b_j and at the Szego-kernel zeros); "clustered" confines them
// to a prescribed small disc and cancels the Szego-zero poles with cleanup
// points, so every pole of the reflected extension lies in that disc.
class GustafssonMap {
 public:
  enum class Variant { scattered, clustered };

  const Domain& domain() const { return *dom_; }
  Variant variant() const { return variant_; }
  cplx base() const { return a_; }
  const SzegoFit& fit() const { return fit_; }
  const std::vector<cplx>& szego_zeros() const { return zeros_; }
  const std::vector<cplx>& cleanup_points() const { return cleanup_points_; }
  const std::vector<cplx>& cleanup_coeffs() const { return cleanup_coeffs_; }
  cplx confinement_center() const { return w0_; }
  double confinement_radius() const { return eps_; }

  const BoundaryFunction& trace() const { return g_trace_; }
  cplx eval(cplx z) const;        // interior, Cauchy integral of the trace
  cplx derivative(cplx z) const;

  // Reflected extension: meromorphic on the domain, equal to conj(g) on the
  // boundary. Poles: scattered variant {b_j} + Szego zeros; clustered variant
  // {b_j} + cleanup points.
  cplx refl_eval(cplx z) const;
  const std::vector<cplx>& refl_poles() const { return refl_poles_; }

  double id_defect_c1() const { return id_defect_; }          // max|g-z| + max|g'-1|
  // Relative defect of the exact boundary identity H_refl = conj(g), measured
  // between numerators so near-zeros of the shared denominator trace do not
  // inflate roundoff.
  double boundary_conj_defect() const { return conj_defect_; }

  // Image boundary refit as a validated Domain (cached).
  const Domain& image_domain() const;

  // construction is via the build_map_* functions
  GustafssonMap(const Domain& dom, Variant variant, cplx a, SzegoFit fit,
                std::vector<cplx> zeros, std::vector<cplx> cleanup_points,
                std::vector<cplx> cleanup_coeffs, cplx w0, double eps,
                BoundaryFunction g_trace, PoleSum refl_num,
                std::vector<cplx> refl_poles, BoundaryFunction denom_trace,
                std::optional<PoleSum> denom_poles);

 private:
  const Domain* dom_;
  Variant variant_;
  cplx a_;
  SzegoFit fit_;
  std::vector<cplx> zeros_, cleanup_points_, cleanup_coeffs_;
  cplx w0_;
  double eps_ = 0;
  BoundaryFunction g_trace_;
  PoleSum refl_num_;
  std::vector<cplx> refl_poles_;
  BoundaryFunction denom_trace_;          // scattered: S(.,a) trace (holomorphic)
  std::optional<PoleSum> denom_poles_;    // clustered: L(.,a) with its pole
  double id_defect_ = 0, conj_defect_ = 0;
  std::shared_ptr<Domain> image_;
};

SzegoFit fit_density_scattered(const KernelSolver& solver, cplx a,
                               const FitOptions& opts);
SzegoFit fit_density_clustered(const KernelSolver& solver, cplx a, cplx w0,
                               double eps, const FitOptions& opts);

GustafssonMap build_map_scattered(const KernelSolver& solver, cplx a,
                                  const FitOptions& opts);
// Confined variant: density points restricted to the disc of radius eps about
// w0 (compactly inside the domain); reflected-extension poles all land there.
GustafssonMap build_map_clustered(const KernelSolver& solver, cplx a, cplx w0,
                                  double eps, const FitOptions& opts);

// One quadrature node: integrals of f over the image domain get the
// contribution sum_k weights[k] * f^(k)(node).
struct QuadratureNode {
  cplx node;
  std::vector<cplx> weights;
};

struct QuadratureData {
  std::vector<QuadratureNode> nodes;
  int dropped_nodes = 0;          // negligible-weight poles, reported not kept
  double max_order2_coeff = 0;    // largest second principal-part coefficient
  double radius_sweep_defect = 0; // extraction variation under radius halving
};

// Pole-by-pole contour extraction of the principal parts of the Schwarz-type
// function of the image domain, transported through g; weights are pi times
// the transported coefficients (scaled by factorials for derivative terms).
QuadratureData quadrature_data(const GustafssonMap& map);

// Relative residuals |moment - node sum| for f(w) = w^m, m = 0..max_degree;
// the moment is the boundary-reduced area integral over the image domain.
// Normalization: max(|moment|, image area * R^m), R = max boundary modulus.
std::vector<double> verify_quadrature(const GustafssonMap& map,
                                      const QuadratureData& data, int max_degree);

}  // namespace qdzip
