#pragma once

#include <array>
#include <span>
#include <vector>

#include "qdzip/types.hpp"

namespace qdzip {

// Closed curve given by a truncated Fourier series z(t) = sum_{|m|<=M} c_m e^{imt},
// t in [0, 2pi). Coefficients are stored c_{-M}..c_{M}. Derivatives are exact.
class Curve {
 public:
  // coeffs.size() must be odd; M = (size-1)/2.
  explicit Curve(std::vector<cplx> coeffs);

  int degree() const { return degree_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx coeff(int m) const;  // zero outside [-M, M]

  // Complex parameter is allowed: Im t > 0 displaces the point to the left of
  // the travel direction (into the domain for positively oriented boundaries).
  cplx point(cplx t) const;
  cplx derivative(cplx t, int order = 1) const;

  double signed_area() const;  // pi * sum m |c_m|^2, positive for CCW
  double max_speed() const;
  double min_speed() const;
  Curve reversed() const;  // t -> -t

 private:
  std::vector<cplx> coeffs_;
  int degree_;
};

struct BoundaryPoint {
  int curve = 0;
  double t = 0;
  cplx z;
  cplx dz;       // z'(t)
  cplx tangent;  // z'/|z'|, unit modulus
  double speed = 0;
};

// n-connected bounded domain. Curves are normalized so the inner curves come
// first (indices 0..n-2, clockwise) and the outer curve last (index n-1,
// counterclockwise); the domain then lies to the left of every curve.
class Domain {
 public:
  enum class Location { inside, outside, near_boundary };

  // Validates: immersion, simplicity at sample resolution, exactly one outer
  // curve, proper nesting, grid a power of two >= 64 and >= 4*max degree.
  Domain(std::vector<Curve> curves, int grid);

  int connectivity() const { return static_cast<int>(curves_.size()); }
  int grid() const { return grid_; }
  const Curve& curve(int k) const { return curves_[k]; }
  int outer_index() const { return connectivity() - 1; }

  std::span<const cplx> points(int k) const { return points_[k]; }
  std::span<const cplx> dpoints(int k) const { return dpoints_[k]; }
  std::span<const double> speeds(int k) const { return speeds_[k]; }

  double area() const { return area_; }
  double diameter() const { return diameter_; }
  cplx centroid(int k) const;  // vertex centroid of curve k's samples

  Location locate(cplx z, double delta = -1) const;
  bool contains(cplx z) const { return locate(z) == Location::inside; }
  double distance_to_boundary(cplx z) const;

  struct Nearest {
    int curve = 0;
    double t = 0;
    cplx z;
    double distance = 0;
  };
  Nearest nearest_boundary(cplx z) const;

  double min_curve_clearance(int k) const;  // distance from curve k to the rest of bdry

 private:
  std::vector<Curve> curves_;
  int grid_;
  std::vector<std::vector<cplx>> points_, dpoints_;
  std::vector<std::vector<double>> speeds_;
  double area_ = 0, diameter_ = 0;

  void build_grids();
};

// Samples of curve k at t_i = 2*pi*i/N. Grid density precondition is enforced
// by the Domain constructor.
std::vector<BoundaryPoint> boundary_grid(const Domain& dom, int k);

// Winding number of the sampled closed curve around p, by tracked phase
// increments; refines locally up to a cap and throws AmbiguityError if the
// phase step cannot be brought under pi/2 (p too close to the curve).
int winding_number(const Curve& c, cplx p, int base_samples);

}  // namespace qdzip
