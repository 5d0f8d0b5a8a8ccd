#pragma once

#include <string>
#include <utility>

#include "qdzip/gustafsson.hpp"

namespace qdzip {

// Negative-power portion of a Laurent expansion: sum_m coeffs[m-1]/(z-pole)^m.
// Trailing coefficient is nonzero; extraction is radius-swept for stability.
struct PrincipalPart {
  cplx pole;
  std::vector<cplx> coeffs;

  cplx eval(cplx z) const;
};

// Compressed record of a quadratizing map: per-curve Fourier coefficients of
// the image boundary g(z_k(t)) (ascending frequency -M..M), the image-plane
// principal parts of the Schwarz-type function h, and the z-plane principal
// parts of the reflected extension. Everything downstream (h, g', the
// reflected extension, the image Bergman kernel) is reconstructible from this
// plus the original boundary. Serialization is checksummed and bit-stable.
struct ZipArchive {
  int connectivity = 0;
  int grid = 0;
  std::string variant;  // "scattered" | "clustered"
  cplx base;
  std::vector<std::vector<cplx>> g_coeffs;
  std::vector<PrincipalPart> h_poles;     // image plane
  std::vector<PrincipalPart> refl_poles;  // z plane, serialized as "H_poles"

  double raw_bytes = 0;         // dense kernel table equivalent, 16 (nN)^2
  double compressed_bytes = 0;  // serialized size
};

ZipArchive pack(const GustafssonMap& map, const QuadratureData& data);

std::string archive_to_json(const ZipArchive& ar);
ZipArchive archive_from_json(const std::string& text);  // IoError on checksum

// Image boundary rebuilt from the archived coefficients alone.
Domain archive_image_domain(const ZipArchive& ar);

// Trace of g on the boundary grid of dom, from the archived coefficients.
BoundaryFunction archive_g_trace(const ZipArchive& ar, const Domain& dom);

// Cauchy transform of conj(zeta) over the boundary of the image domain;
// identically 0 for a disc centered at the origin, conj(c) for center c.
cplx q_transform(const Domain& image, cplx z);

// Schwarz-type function of the image domain: sum of archived principal parts
// plus the Cauchy transform of conj(zeta). Boundary values are conj(w).
cplx unzip_h(const ZipArchive& ar, const Domain& image, cplx z);

// g' inside the original domain by the derivative Cauchy integral of the
// archived boundary values.
cplx unzip_gprime(const ZipArchive& ar, const Domain& dom, cplx z);

// Reflected extension inside the original domain: archived z-plane principal
// parts plus the Cauchy transform of conj(g); the transform annihilates the
// principal parts of the trace, so the split is exact.
cplx unzip_refl(const ZipArchive& ar, const Domain& dom, cplx z);

// Max over pairs of |K_dom(z,w) - g'(z) conj(g'(w)) K_image(g(z), g(w))| with
// both kernels assembled independently and g, g' reconstructed from the
// archive.
double bergman_pullback_residual(const ZipArchive& ar, const Domain& dom,
                                 const std::vector<std::pair<cplx, cplx>>& pairs,
                                 unsigned threads = 1);

// Bivariate polynomial relation sum q_st u^s v^t = 0 on given samples, total
// degree <= degree; q is the right singular vector of the smallest singular
// value of the monomial sample matrix, normalized to unit norm.
struct AlgebraicRelation {
  int degree = 0;
  std::vector<cplx> coeffs;  // (degree+1)^2 grid, index s*(degree+1)+t
  double residual = 0;       // max over samples |sum q_st u^s v^t|
  double sigma_min = 0, sigma_max = 0;
  double drop = 1;       // sigma_min(d) / degree-1 baseline during a search
  bool decisive = true;  // false when the rank decision is ambiguous
  bool mixed = false;    // has terms with s>0 and terms with t>0

  cplx eval(cplx u, cplx v) const;
};

AlgebraicRelation fit_algebraic_relation(
    const std::vector<std::pair<cplx, cplx>>& uv, int degree);

// Increases the degree until the smallest singular value collapses (factor
// 1e6 against the degree-1 baseline, or 1e-10 of sigma_max); decisive=false
// when no degree up to max_degree produces the collapse.
AlgebraicRelation fit_relation_search(
    const std::vector<std::pair<cplx, cplx>>& uv, int max_degree);

// Quotient-pair fit u ~ Q1(z, conj z)/Q2(z, conj z) on boundary samples. Both
// polynomials are restricted to the numerically attainable column space of
// the monomial matrix, which bars the trivial solutions generated by the
// boundary's own algebraic relation.
struct QuotientRelation {
  int degree = 0;
  std::vector<cplx> num_coeffs, den_coeffs;  // (degree+1)^2 grids
  double residual = 0;  // max over samples |Q1 - u Q2| at unit joint norm
  double den_norm = 0;  // share of the joint norm in the denominator
};

QuotientRelation fit_quotient_relation(const std::vector<cplx>& u,
                                       const std::vector<cplx>& z, int degree);

}  // namespace qdzip
