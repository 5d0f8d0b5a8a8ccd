#pragma once

#include <cstdint>

#include "qdzip/geometry.hpp"

namespace qdzip {

// Closed-form kernels on the disc |z - c| < R. Independent of the boundary
// solvers; used as ground truth.
struct DiscOracle {
  double R = 1.0;
  cplx c = 0.0;

  cplx szego(cplx z, cplx w) const;
  cplx garabedian(cplx z, cplx w) const;  // z != w
  cplx bergman(cplx z, cplx w) const;
  cplx ahlfors(cplx z, cplx a) const;
};

// Series kernels on the annulus r < |z| < 1, plus the closed-form pieces of
// its harmonic-measure data. Series are truncated adaptively; the geometric
// remainder at the cut is recorded in last_tail_bound().
class AnnulusOracle {
 public:
  explicit AnnulusOracle(double r);

  double inner_radius() const { return r_; }
  cplx szego(cplx z, cplx w) const;
  cplx bergman(cplx z, cplx w) const;
  double last_tail_bound() const { return tail_; }

  double harmonic_measure_inner(cplx z) const;  // ln|z| / ln r
  cplx f1_prime(cplx z) const;                  // 1/(z ln r)
  double period11() const;                      // -2pi / ln r

  // The single zero of S(., a); polar scan of the series plus Newton.
  cplx szego_zero(cplx a) const;

 private:
  double r_;
  mutable double tail_ = 0;
};

Domain disc_domain(int grid, double R = 1.0, cplx center = 0.0);
Domain annulus_domain(double r, int grid);

// Random smooth n-connected domain, deterministic in the seed. Draws Fourier
// perturbations of circles and retries (bounded) until the configuration
// passes validation with comfortable curve clearances.
Domain blob_domain(int n_curves, std::uint64_t seed, int grid);

}  // namespace qdzip
