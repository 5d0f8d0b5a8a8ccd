#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "qdzip/geometry.hpp"

namespace qdzip_test {

using qdzip::cplx;

inline double dist(cplx a, cplx b) { return std::abs(a - b); }

inline qdzip::Curve circle_curve(double R, cplx c = 0.0) {
  return qdzip::Curve({cplx(0.0), c, cplx(R)});
}

// z(t) = cos t + 0.5 i sin t.
inline qdzip::Curve ellipse_curve() {
  return qdzip::Curve({cplx(0.25), cplx(0.0), cplx(0.75)});
}

// Deepest cell center of a fixed lattice over the bounding box; deterministic.
inline cplx pick_deep_point(const qdzip::Domain& dom) {
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (int k = 0; k < dom.connectivity(); ++k)
    for (const cplx& z : dom.points(k)) {
      lo_re = std::min(lo_re, z.real());
      hi_re = std::max(hi_re, z.real());
      lo_im = std::min(lo_im, z.imag());
      hi_im = std::max(hi_im, z.imag());
    }
  const int G = 32;
  cplx best = 0;
  double depth = -1;
  for (int iy = 0; iy < G; ++iy)
    for (int ix = 0; ix < G; ++ix) {
      cplx z(lo_re + (hi_re - lo_re) * (ix + 0.5) / G,
             lo_im + (hi_im - lo_im) * (iy + 0.5) / G);
      try {
        if (dom.locate(z, 0.0) != qdzip::Domain::Location::inside) continue;
      } catch (...) {
        continue;
      }
      double d = dom.distance_to_boundary(z);
      if (d > depth) {
        depth = d;
        best = z;
      }
    }
  return best;
}

// Seeded interior sample points at the given boundary clearance.
inline std::vector<cplx> interior_samples(const qdzip::Domain& dom,
                                          std::uint64_t seed, int count,
                                          double depth,
                                          const std::vector<cplx>& avoid = {},
                                          double clear = 0) {
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (int k = 0; k < dom.connectivity(); ++k)
    for (const cplx& z : dom.points(k)) {
      lo_re = std::min(lo_re, z.real());
      hi_re = std::max(hi_re, z.real());
      lo_im = std::min(lo_im, z.imag());
      hi_im = std::max(hi_im, z.imag());
    }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo_re, hi_re), uy(lo_im, hi_im);
  std::vector<cplx> pts;
  for (int tries = 0; static_cast<int>(pts.size()) < count && tries < 100000;
       ++tries) {
    cplx z(ux(rng), uy(rng));
    try {
      if (dom.locate(z, depth) != qdzip::Domain::Location::inside) continue;
    } catch (...) {
      continue;
    }
    bool ok = true;
    for (cplx p : avoid)
      if (std::abs(z - p) < clear) {
        ok = false;
        break;
      }
    if (ok) pts.push_back(z);
  }
  return pts;
}

}  // namespace qdzip_test
