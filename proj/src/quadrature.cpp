#include "qdzip/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qdzip {

cplx integrate_curve(const BoundaryFunction& f, int k, Weight w) {
  const Domain& dom = f.domain();
  const int N = dom.grid();
  cplx acc = 0;
  for (int i = 0; i < N; ++i) {
    cplx v = f.sample(k, i);
    switch (w) {
      case Weight::none: break;
      case Weight::dz: v *= dom.dpoints(k)[i]; break;
      case Weight::ds: v *= dom.speeds(k)[i]; break;
    }
    acc += v;
  }
  return acc * (TWO_PI / N);
}

cplx integrate_closed(const BoundaryFunction& f, Weight w) {
  cplx acc = 0;
  for (int k = 0; k < f.domain().connectivity(); ++k) acc += integrate_curve(f, k, w);
  return acc;
}

namespace {

constexpr int kMaxUpsampled = 16384;

// Upsampling factor so the local node spacing near z is at most dist/5.
int upsample_factor_for(const Domain& dom, int k, double dist) {
  double maxspeed = 0;
  for (double s : dom.speeds(k)) maxspeed = std::max(maxspeed, s);
  const double spacing = TWO_PI * maxspeed / dom.grid();
  int factor = 1;
  while (spacing / factor > dist / 5 && dom.grid() * factor < kMaxUpsampled)
    factor *= 2;
  if (spacing / factor > dist / 5)
    throw AmbiguityError("cauchy_eval: target too close to the boundary for the upsampling budget");
  return factor;
}

double curve_distance(const Domain& dom, int k, cplx z) {
  double best = 1e300;
  for (const auto& p : dom.points(k)) best = std::min(best, std::abs(z - p));
  return best;
}

cplx cauchy_sum(const BoundaryFunction& f, cplx z, int deriv) {
  const Domain& dom = f.domain();
  double fact = 1;
  for (int j = 2; j <= deriv; ++j) fact *= j;
  cplx acc = 0;
  for (int k = 0; k < dom.connectivity(); ++k) {
    const int N = dom.grid();
    double dist = curve_distance(dom, k, z);
    if (dist <= 0) throw AmbiguityError("cauchy_eval: target on the boundary grid");
    int factor = upsample_factor_for(dom, k, dist);
    cplx curve_acc = 0;
    if (factor == 1) {
      for (int i = 0; i < N; ++i) {
        cplx d = dom.points(k)[i] - z;
        cplx p = d;
        for (int j = 0; j < deriv; ++j) p *= d;
        curve_acc += f.sample(k, i) * dom.dpoints(k)[i] / p;
      }
      curve_acc *= TWO_PI / N;
    } else {
      std::vector<cplx> fine = f.upsampled(k, factor);
      const int M = N * factor;
      const Curve& c = dom.curve(k);
      for (int i = 0; i < M; ++i) {
        double t = TWO_PI * i / M;
        cplx d = c.point(t) - z;
        cplx p = d;
        for (int j = 0; j < deriv; ++j) p *= d;
        curve_acc += fine[i] * c.derivative(t) / p;
      }
      curve_acc *= TWO_PI / M;
    }
    acc += curve_acc;
  }
  return acc * fact / cplx(0, TWO_PI);
}

}  // namespace

cplx cauchy_eval(const BoundaryFunction& f, cplx z) { return cauchy_sum(f, z, 0); }

cplx cauchy_derivative_eval(const BoundaryFunction& f, cplx z, int m) {
  if (m < 0) throw ConstructionError("cauchy_derivative_eval: negative order");
  return cauchy_sum(f, z, m);
}

int argument_principle_count(const std::function<cplx(cplx)>& f, cplx center,
                             double radius, double scale) {
  const double h = 1e-6 * std::max(scale, radius);
  for (int K = 64; K <= 4096; K *= 2) {
    cplx acc = 0;
    bool bad = false;
    for (int i = 0; i < K && !bad; ++i) {
      double th = TWO_PI * i / K;
      cplx z = center + radius * std::exp(cplx(0, th));
      cplx fv = f(z);
      if (std::abs(fv) == 0) { bad = true; break; }
      cplx fp = (f(z + h) - f(z - h)) / (2 * h);
      cplx dz = radius * cplx(0, 1) * std::exp(cplx(0, th));
      acc += fp / fv * dz;
    }
    if (bad) throw AmbiguityError("argument_principle_count: zero on the contour");
    cplx w = acc * (TWO_PI / K) / cplx(0, TWO_PI);
    double re = w.real();
    long r = std::lround(re);
    if (std::abs(w - cplx(static_cast<double>(r), 0)) <= 0.1) return static_cast<int>(r);
  }
  throw AmbiguityError("argument_principle_count: integral did not settle on an integer");
}

SearchRegion SearchRegion::rect(double lo_re, double hi_re, double lo_im, double hi_im) {
  SearchRegion r;
  r.lo_re = lo_re;
  r.hi_re = hi_re;
  r.lo_im = lo_im;
  r.hi_im = hi_im;
  r.inside = [=](cplx z) {
    return z.real() >= lo_re && z.real() <= hi_re && z.imag() >= lo_im && z.imag() <= hi_im;
  };
  return r;
}

SearchRegion SearchRegion::domain_interior(const Domain& dom, double margin) {
  SearchRegion r;
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (const auto& z : dom.points(dom.outer_index())) {
    lo_re = std::min(lo_re, z.real());
    hi_re = std::max(hi_re, z.real());
    lo_im = std::min(lo_im, z.imag());
    hi_im = std::max(hi_im, z.imag());
  }
  r.lo_re = lo_re;
  r.hi_re = hi_re;
  r.lo_im = lo_im;
  r.hi_im = hi_im;
  // Precompute boundary samples and unit tangents so the predicate needs no
  // domain access afterwards. Orientation is normalized with the domain to
  // the left of every boundary curve, so the side of the nearest sample's
  // tangent decides membership; the sample distance stands in for the true
  // boundary distance (the gap is quadratic in the grid spacing).
  std::vector<cplx> pts, tans;
  for (int k = 0; k < dom.connectivity(); ++k) {
    const auto& samples = dom.points(k);
    const Curve& c = dom.curve(k);
    const int n = static_cast<int>(samples.size());
    for (int i = 0; i < n; ++i) {
      pts.push_back(samples[i]);
      cplx d = c.derivative(TWO_PI * i / n);
      tans.push_back(d / std::abs(d));
    }
  }
  r.inside = [pts = std::move(pts), tans = std::move(tans), margin, lo_re, hi_re, lo_im,
              hi_im](cplx z) {
    if (z.real() < lo_re || z.real() > hi_re || z.imag() < lo_im || z.imag() > hi_im)
      return false;
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double dx = z.real() - pts[i].real();
      double dy = z.imag() - pts[i].imag();
      double d2 = dx * dx + dy * dy;
      if (d2 < bd) {
        bd = d2;
        best = i;
      }
    }
    if (bd < margin * margin) return false;
    cplx w = z - pts[best];
    return tans[best].real() * w.imag() - tans[best].imag() * w.real() > 0;
  };
  return r;
}

int square_winding(const std::function<cplx(cplx)>& f, cplx center, double half) {
  const std::array<cplx, 4> corners = {
      center + cplx(-half, -half), center + cplx(half, -half),
      center + cplx(half, half), center + cplx(-half, half)};
  for (int per_edge = 16; per_edge <= 4096; per_edge *= 2) {
    double total = 0;
    bool ok = true;
    cplx prev = f(corners[0]);
    if (std::abs(prev) == 0) throw AmbiguityError("square_winding: zero on contour");
    for (int e = 0; e < 4 && ok; ++e) {
      cplx a = corners[e], b = corners[(e + 1) % 4];
      for (int i = 1; i <= per_edge && ok; ++i) {
        cplx z = a + (b - a) * (static_cast<double>(i) / per_edge);
        cplx cur = f(z);
        if (std::abs(cur) == 0) throw AmbiguityError("square_winding: zero on contour");
        double step = std::arg(cur / prev);
        if (std::abs(step) > PI / 2) ok = false;
        total += step;
        prev = cur;
      }
    }
    if (ok) {
      long r = std::lround(total / TWO_PI);
      return static_cast<int>(r);
    }
  }
  throw AmbiguityError("square_winding: phase tracking failed (zero near contour)");
}

namespace {

struct Square {
  cplx center;
  double half;
  bool lineage = false;  // some ancestor passed a positive winding count
};

// Square classification against the region: countable only if the whole
// closed square is inside (checked on a boundary sampling).
enum class Fit { in, out, straddle };

Fit classify(const SearchRegion& region, const Square& s, int lattice = 0) {
  int in_cnt = 0, out_cnt = 0;
  const int per_edge = 8;
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i < per_edge; ++i) {
      double u = static_cast<double>(i) / per_edge;
      cplx z;
      switch (e) {
        case 0: z = s.center + cplx(-s.half + 2 * s.half * u, -s.half); break;
        case 1: z = s.center + cplx(s.half, -s.half + 2 * s.half * u); break;
        case 2: z = s.center + cplx(s.half - 2 * s.half * u, s.half); break;
        default: z = s.center + cplx(-s.half, s.half - 2 * s.half * u); break;
      }
      (region.inside(z) ? in_cnt : out_cnt)++;
    }
  }
  (region.inside(s.center) ? in_cnt : out_cnt)++;
  if (out_cnt == 0) return Fit::in;
  if (in_cnt == 0 && lattice > 0) {
    // Second opinion before declaring a large square empty: a region
    // component such as an annular band can pass between the edge probes
    // and the center without touching either.
    for (int iy = 0; iy < lattice && in_cnt == 0; ++iy) {
      for (int ix = 0; ix < lattice && in_cnt == 0; ++ix) {
        double ux = (2.0 * ix + 1.0) / lattice - 1.0;
        double uy = (2.0 * iy + 1.0) / lattice - 1.0;
        if (region.inside(s.center + cplx(ux * s.half, uy * s.half))) ++in_cnt;
      }
    }
  }
  if (in_cnt == 0) return Fit::out;
  return Fit::straddle;
}

int counted_winding(const std::function<cplx(cplx)>& f, const Square& s) {
  // Retry with a slightly inflated square when a zero sits on the contour.
  double grow = 1.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    try {
      return square_winding(f, s.center, s.half * grow);
    } catch (const AmbiguityError&) {
      grow *= 1.0371;
    }
  }
  return square_winding(f, s.center, s.half * grow);
}

}  // namespace

std::vector<cplx> locate_zeros(const std::function<cplx(cplx)>& f,
                               const SearchRegion& region, int expected,
                               const ZeroSearchOptions& opt) {
  const double width = region.hi_re - region.lo_re;
  const double height = region.hi_im - region.lo_im;
  const double size = std::max(width, height);
  const cplx mid(0.5 * (region.lo_re + region.hi_re), 0.5 * (region.lo_im + region.hi_im));

  std::vector<Square> work{{mid, 0.5 * size * 1.0000003}};
  std::vector<Square> seeds;
  const double floor_half = size * 1e-4;

  // Squares still coarse relative to the region get the denser emptiness
  // probe; below this size no region feature can hide strictly inside one.
  const double coarse_half = 0.01 * size;
  // Cutoff for fresh winding counts. Every zero seen at this scale belongs
  // to some positively counted square, and only that ancestry is followed
  // further down; slivers hugging the region's edge are assumed zero-free,
  // so the evaluation count stays proportional to the number of zeros
  // instead of the rim perimeter over the floor size.
  const double count_half = opt.edge_resolution * size;

  int depth = 0;
  while (!work.empty() && depth++ < opt.max_depth) {
    std::vector<Square> next;
    for (const auto& s : work) {
      Fit fit = classify(region, s, s.half >= coarse_half ? 6 : 0);
      if (fit == Fit::out) continue;
      if (s.half < count_half && !s.lineage) continue;  // edge sliver, assumed zero-free
      bool counted = false;
      if (fit == Fit::in) {
        int w;
        try {
          w = counted_winding(f, s);
        } catch (const AmbiguityError&) {
          w = 1;  // undecidable contour: keep subdividing
        }
        if (w <= 0) continue;
        counted = true;
        if (s.half <= floor_half) {
          seeds.push_back(s);
          continue;
        }
      } else if (s.half <= floor_half) {
        continue;  // straddling at the floor: zeros are assumed interior
      }
      const double q = 0.5 * s.half;
      const bool lin = s.lineage || counted;
      next.push_back({s.center + cplx(-q, -q), q, lin});
      next.push_back({s.center + cplx(q, -q), q, lin});
      next.push_back({s.center + cplx(-q, q), q, lin});
      next.push_back({s.center + cplx(q, q), q, lin});
    }
    work = std::move(next);
  }
  for (const auto& s : work) {
    Fit fit = classify(region, s);
    if (fit == Fit::in) seeds.push_back(s);
  }

  // Newton polish with central-difference derivatives.
  const double fd = 1e-6 * opt.scale;
  std::vector<cplx> roots;
  for (const auto& s : seeds) {
    cplx z = s.center;
    bool ok = false;
    for (int it = 0; it < 80; ++it) {
      cplx fv = f(z);
      cplx fp = (f(z + fd) - f(z - fd)) / (2 * fd);
      if (std::abs(fp) == 0) break;
      cplx step = fv / fp;
      z -= step;
      if (!region.inside(z)) {
        // allow transient exits near the region rim
        if (it > 40) break;
      }
      if (std::abs(step) < opt.newton_tol * std::max(1.0, std::abs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok) continue;
    if (!region.inside(z)) continue;
    bool dup = false;
    for (const auto& r : roots)
      if (std::abs(r - z) < opt.dedupe_tol * size) dup = true;
    if (!dup) roots.push_back(z);
  }

  if (expected >= 0 && static_cast<int>(roots.size()) != expected)
    throw AmbiguityError("locate_zeros: found " + std::to_string(roots.size()) +
                         " zeros, expected " + std::to_string(expected) +
                         " (count mismatch after subdivision)");
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace qdzip
