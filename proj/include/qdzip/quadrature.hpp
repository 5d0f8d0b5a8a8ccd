#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qdzip/boundary.hpp"

namespace qdzip {

enum class Weight { none, dz, ds };

// Periodic trapezoid rule over one curve / the whole boundary; spectrally
// accurate for smooth integrands.
cplx integrate_curve(const BoundaryFunction& f, int k, Weight w);
cplx integrate_closed(const BoundaryFunction& f, Weight w);

// (1/2pi i) contour integral of f(zeta)/(zeta - z) over the full boundary,
// for z strictly inside. Near-boundary targets are handled by spectral
// upsampling of the close curve; beyond the upsampling budget this throws
// AmbiguityError. Reproduces holomorphic boundary data exactly in the limit.
cplx cauchy_eval(const BoundaryFunction& f, cplx z);

// m-th derivative variant: kernel m!/(zeta - z)^{m+1}.
cplx cauchy_derivative_eval(const BoundaryFunction& f, cplx z, int m);

// Number of zeros minus poles of f inside the circle |z - center| = radius,
// by the trapezoid rule on f'/f (central-difference derivative). Throws
// AmbiguityError if the integral refuses to settle on an integer.
int argument_principle_count(const std::function<cplx(cplx)>& f, cplx center,
                             double radius, double scale = 1.0);

// Axis-aligned search region with a membership predicate. Squares used for
// counting must lie entirely in the region.
struct SearchRegion {
  double lo_re = 0, hi_re = 0, lo_im = 0, hi_im = 0;
  std::function<bool(cplx)> inside;

  static SearchRegion rect(double lo_re, double hi_re, double lo_im, double hi_im);
  // Interior of a domain at the given distance from its boundary.
  static SearchRegion domain_interior(const Domain& dom, double margin);
};

struct ZeroSearchOptions {
  double scale = 1.0;          // sets finite-difference steps and tolerances
  int max_depth = 24;
  double newton_tol = 1e-12;   // relative to scale
  double dedupe_tol = 1e-7;    // relative to region size
  // Width of the edge band (relative to region size) inside which zeros may
  // be missed; smaller values probe the rim harder and cost more counts.
  double edge_resolution = 5e-3;
};

// All zeros of an analytic f in the region: quadtree subdivision counted by
// the argument principle on square contours, then Newton polishing. Zeros
// are assumed to sit in the region's interior: anything closer to the
// region's edge than about edge_resolution times its size may be missed,
// which keeps the number of f evaluations proportional to the zero count
// rather than the rim length. Throws if the polished count disagrees with
// `expected` (expected < 0 disables the check and returns whatever was
// found).
std::vector<cplx> locate_zeros(const std::function<cplx(cplx)>& f,
                               const SearchRegion& region, int expected,
                               const ZeroSearchOptions& opt = {});

// Winding number of f along the positively traversed square contour.
// Adaptive phase tracking; throws AmbiguityError when a zero sits on or very
// near the contour.
int square_winding(const std::function<cplx(cplx)>& f, cplx center, double half);

}  // namespace qdzip
