#include "qdzip/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qdzip {

Curve::Curve(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty() || coeffs_.size() % 2 == 0)
    throw ConstructionError("curve coefficient list must have odd length");
  degree_ = static_cast<int>(coeffs_.size() / 2);
}

cplx Curve::coeff(int m) const {
  if (m < -degree_ || m > degree_) return 0.0;
  return coeffs_[static_cast<std::size_t>(m + degree_)];
}

cplx Curve::point(cplx t) const {
  const cplx e = std::exp(cplx(0, 1) * t);
  const cplx einv = 1.0 / e;
  // Split into nonnegative and negative frequencies; Horner in e and 1/e.
  cplx pos = 0;
  for (int m = degree_; m >= 0; --m) pos = pos * e + coeff(m);
  cplx neg = 0;
  for (int m = -degree_; m <= -1; ++m) neg = neg * einv + coeff(m);
  return pos + neg * einv;
}

cplx Curve::derivative(cplx t, int order) const {
  const cplx e = std::exp(cplx(0, 1) * t);
  const cplx einv = 1.0 / e;
  auto f = [&](int m) {
    cplx im(0, m);
    cplx w = 1;
    for (int k = 0; k < order; ++k) w *= im;
    return w * coeff(m);
  };
  cplx pos = 0;
  for (int m = degree_; m >= 0; --m) pos = pos * e + f(m);
  cplx neg = 0;
  for (int m = -degree_; m <= -1; ++m) neg = neg * einv + f(m);
  return pos + neg * einv;
}

double Curve::signed_area() const {
  double s = 0;
  for (int m = -degree_; m <= degree_; ++m) s += m * std::norm(coeff(m));
  return PI * s;
}

double Curve::max_speed() const {
  const int n = std::max(64, 8 * degree_);
  double v = 0;
  for (int i = 0; i < n; ++i) v = std::max(v, std::abs(derivative(TWO_PI * i / n)));
  return v;
}

double Curve::min_speed() const {
  const int n = std::max(256, 16 * degree_);
  double v = std::abs(derivative(0.0));
  for (int i = 1; i < n; ++i) v = std::min(v, std::abs(derivative(TWO_PI * i / n)));
  return v;
}

Curve Curve::reversed() const {
  std::vector<cplx> rc(coeffs_.rbegin(), coeffs_.rend());
  return Curve(std::move(rc));
}

int winding_number(const Curve& c, cplx p, int base_samples) {
  int n = std::max(base_samples, 8 * c.degree() + 16);
  for (int attempt = 0; attempt < 8; ++attempt) {
    double total = 0;
    bool ok = true;
    cplx prev = c.point(0.0) - p;
    if (std::abs(prev) == 0) throw AmbiguityError("winding: point on curve");
    for (int i = 1; i <= n && ok; ++i) {
      cplx cur = c.point(TWO_PI * i / n) - p;
      if (std::abs(cur) == 0) throw AmbiguityError("winding: point on curve");
      double step = std::arg(cur / prev);
      if (std::abs(step) > PI / 2) ok = false;
      total += step;
      prev = cur;
    }
    if (ok) {
      double w = total / TWO_PI;
      long r = std::lround(w);
      if (std::abs(w - r) > 0.1)
        throw AmbiguityError("winding: non-integer phase total");
      return static_cast<int>(r);
    }
    n *= 2;
  }
  throw AmbiguityError("winding: phase tracking failed near curve");
}

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Local minimum of |c(s) - c(t)| by shrinking pattern search in a box around
// the starting parameters; the box keeps s and t apart so the trivial diagonal
// minimum is out of reach.
double refine_pair_distance(const Curve& c, double s0, double t0, double box) {
  double s = s0, t = t0, r = box / 2;
  double best = std::abs(c.point(s) - c.point(t));
  for (int iter = 0; iter < 60; ++iter) {
    bool moved = false;
    for (int ds = -1; ds <= 1; ++ds)
      for (int dt = -1; dt <= 1; ++dt) {
        if (ds == 0 && dt == 0) continue;
        double ns = s + r * ds, nt = t + r * dt;
        if (std::abs(ns - s0) > box || std::abs(nt - t0) > box) continue;
        double d = std::abs(c.point(ns) - c.point(nt));
        if (d < best) {
          best = d;
          s = ns;
          t = nt;
          moved = true;
        }
      }
    if (!moved) r /= 2;
    if (r < 1e-14) break;
  }
  return best;
}

void check_simple(const Curve& c, int idx) {
  const int n = 512;
  const double h = TWO_PI / n;
  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) z[i] = c.point(h * i);
  std::vector<double> step(n);
  double min_step = 1e300, scale = 0;
  for (int i = 0; i < n; ++i) {
    double fwd = std::abs(z[(i + 1) % n] - z[i]);
    double bwd = std::abs(z[i] - z[(i + n - 1) % n]);
    step[i] = std::max(fwd, bwd);
    min_step = std::min(min_step, fwd);
    scale = std::max(scale, std::abs(z[i] - z[0]));
  }
  if (min_step <= 0 || scale <= 0)
    throw ConstructionError("curve " + std::to_string(idx) + " degenerate");
  // Pairwise separation away from the parameter diagonal: samples close in
  // the plane but far along the curve flag a candidate crossing, which is
  // confirmed by refining the true pair distance toward zero.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 4; j < n; ++j) {
      int dt = std::min(j - i, n - (j - i));
      if (dt < 4) continue;
      double d = std::abs(z[i] - z[j]);
      if (d < 0.5 * min_step)
        throw ConstructionError("curve " + std::to_string(idx) +
                                " self-intersects at sample resolution");
      if (dt >= 6 && d < step[i] + step[j] &&
          refine_pair_distance(c, h * i, h * j, 2 * h) < 1e-8 * scale)
        throw ConstructionError("curve " + std::to_string(idx) +
                                " self-intersects at sample resolution");
    }
  }
}

}  // namespace

Domain::Domain(std::vector<Curve> curves, int grid) : curves_(std::move(curves)), grid_(grid) {
  if (curves_.empty()) throw ConstructionError("domain needs at least one curve");
  int maxdeg = 0;
  for (const auto& c : curves_) maxdeg = std::max(maxdeg, c.degree());
  if (!is_pow2(grid_) || grid_ < 64)
    throw ConstructionError("grid must be a power of two, at least 64");
  if (grid_ < 4 * maxdeg)
    throw ConstructionError("grid must be at least 4x the max Fourier degree");

  const int n = static_cast<int>(curves_.size());
  for (int k = 0; k < n; ++k) {
    if (curves_[k].min_speed() < 1e-12)
      throw ConstructionError("curve " + std::to_string(k) + " has a vanishing derivative");
    check_simple(curves_[k], k);
  }

  // Containment matrix via winding of curve j around a sample of curve k.
  std::vector<std::vector<bool>> in(n, std::vector<bool>(n, false));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      int w = winding_number(curves_[j], curves_[k].point(0.0), 4 * grid_);
      in[k][j] = (w != 0);  // curve k sits inside curve j
    }
  }
  int outer = -1;
  for (int j = 0; j < n; ++j) {
    bool contains_all = true;
    for (int k = 0; k < n; ++k)
      if (k != j && !in[k][j]) contains_all = false;
    if (contains_all) {
      if (outer >= 0) throw ConstructionError("ambiguous outer curve");
      outer = j;
    }
  }
  if (outer < 0) throw ConstructionError("no curve contains all others (nested-inclusion error)");
  for (int k = 0; k < n; ++k) {
    if (k == outer) continue;
    for (int j = 0; j < n; ++j) {
      if (j == k || j == outer) continue;
      if (in[k][j])
        throw ConstructionError("inner curves are nested; domain is not a valid multiply connected region");
    }
  }

  // Reorder: inner curves in input order, outer last; fix orientations.
  std::vector<Curve> ordered;
  ordered.reserve(n);
  for (int k = 0; k < n; ++k)
    if (k != outer) ordered.push_back(curves_[k]);
  ordered.push_back(curves_[outer]);
  for (int k = 0; k < n; ++k) {
    double sa = ordered[k].signed_area();
    if (std::abs(sa) < 1e-14) throw ConstructionError("curve encloses no area");
    const bool want_ccw = (k == n - 1);
    if ((sa > 0) != want_ccw) ordered[k] = ordered[k].reversed();
  }
  curves_ = std::move(ordered);

  build_grids();

  area_ = 0;
  for (const auto& c : curves_) area_ += c.signed_area();
  if (area_ <= 0) throw ConstructionError("domain has nonpositive area");

  // True diameter of the closure: the farthest pair lies on the outer curve.
  const auto& outer_pts = points_[connectivity() - 1];
  diameter_ = 0;
  for (std::size_t i = 0; i < outer_pts.size(); ++i)
    for (std::size_t j = i + 1; j < outer_pts.size(); ++j)
      diameter_ = std::max(diameter_, std::abs(outer_pts[i] - outer_pts[j]));
}

void Domain::build_grids() {
  const int n = connectivity();
  points_.assign(n, {});
  dpoints_.assign(n, {});
  speeds_.assign(n, {});
  for (int k = 0; k < n; ++k) {
    points_[k].resize(grid_);
    dpoints_[k].resize(grid_);
    speeds_[k].resize(grid_);
    for (int i = 0; i < grid_; ++i) {
      double t = TWO_PI * i / grid_;
      points_[k][i] = curves_[k].point(t);
      dpoints_[k][i] = curves_[k].derivative(t);
      speeds_[k][i] = std::abs(dpoints_[k][i]);
    }
  }
}

cplx Domain::centroid(int k) const {
  cplx s = 0;
  for (const auto& z : points_[k]) s += z;
  return s / static_cast<double>(grid_);
}

Domain::Location Domain::locate(cplx z, double delta) const {
  if (delta < 0) {
    double h = 0;
    for (int k = 0; k < connectivity(); ++k)
      for (double s : speeds_[k]) h = std::max(h, s);
    delta = 0.75 * TWO_PI * h / grid_;
  }
  if (distance_to_boundary(z) < delta) return Location::near_boundary;
  int total = 0;
  for (int k = 0; k < connectivity(); ++k) total += winding_number(curves_[k], z, grid_);
  return total == 1 ? Location::inside : Location::outside;
}

double Domain::distance_to_boundary(cplx z) const {
  return nearest_boundary(z).distance;
}

Domain::Nearest Domain::nearest_boundary(cplx z) const {
  Nearest best;
  best.distance = 1e300;
  const double h = TWO_PI / grid_;
  for (int k = 0; k < connectivity(); ++k) {
    int arg = 0;
    double bd = 1e300;
    for (int i = 0; i < grid_; ++i) {
      double d = std::abs(z - points_[k][i]);
      if (d < bd) {
        bd = d;
        arg = i;
      }
    }
    // Parabolic refinement in the parameter around the best sample.
    double t0 = h * arg;
    auto f = [&](double t) { return std::abs(z - curves_[k].point(t)); };
    double fm = f(t0 - h), f0 = bd, fp = f(t0 + h);
    double denom = fm - 2 * f0 + fp;
    double tb = t0;
    if (std::abs(denom) > 1e-300) {
      double shift = 0.5 * (fm - fp) / denom * h;
      if (std::abs(shift) < h) {
        double fs = f(t0 + shift);
        if (fs < bd) {
          bd = fs;
          tb = t0 + shift;
        }
      }
    }
    if (bd < best.distance) {
      best.distance = bd;
      best.curve = k;
      best.t = std::fmod(tb + TWO_PI, TWO_PI);
      best.z = curves_[k].point(best.t);
    }
  }
  return best;
}

double Domain::min_curve_clearance(int k) const {
  double best = 1e300;
  for (int j = 0; j < connectivity(); ++j) {
    if (j == k) continue;
    for (const auto& z : points_[k])
      for (const auto& w : points_[j]) best = std::min(best, std::abs(z - w));
  }
  return best;
}

std::vector<BoundaryPoint> boundary_grid(const Domain& dom, int k) {
  std::vector<BoundaryPoint> out(dom.grid());
  for (int i = 0; i < dom.grid(); ++i) {
    BoundaryPoint& b = out[i];
    b.curve = k;
    b.t = TWO_PI * i / dom.grid();
    b.z = dom.points(k)[i];
    b.dz = dom.dpoints(k)[i];
    b.speed = dom.speeds(k)[i];
    b.tangent = b.dz / b.speed;
  }
  return out;
}

}  // namespace qdzip
