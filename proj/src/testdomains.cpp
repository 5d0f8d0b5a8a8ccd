#include "qdzip/testdomains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qdzip {

cplx DiscOracle::szego(cplx z, cplx w) const {
  cplx u = (z - c) / R, v = (w - c) / R;
  return (1.0 / (TWO_PI * (1.0 - u * std::conj(v)))) / R;
}

cplx DiscOracle::garabedian(cplx z, cplx w) const {
  return 1.0 / (TWO_PI * (z - w));
}

cplx DiscOracle::bergman(cplx z, cplx w) const {
  cplx u = (z - c) / R, v = (w - c) / R;
  cplx d = 1.0 - u * std::conj(v);
  return (1.0 / (PI * d * d)) / (R * R);
}

cplx DiscOracle::ahlfors(cplx z, cplx a) const {
  cplx u = (z - c) / R, v = (a - c) / R;
  return (u - v) / (1.0 - std::conj(v) * u);
}

AnnulusOracle::AnnulusOracle(double r) : r_(r) {
  if (!(r > 0 && r < 1))
    throw ConstructionError("annulus oracle: inner radius must lie in (0,1)");
}

namespace {

constexpr int kSeriesCap = 200000;

}  // namespace

cplx AnnulusOracle::szego(cplx z, cplx w) const {
  const cplx u = z * std::conj(w);
  const double a = std::abs(u);

  // Forward branch: sum u^n / (1 + r^{2n+1}), n >= 0; ratio a.
  cplx acc = 0;
  double peak = 0;
  double fwd_tail = 0;
  {
    cplx un = 1.0;
    double rp = r_;  // r^{2n+1}
    for (int n = 0; n < kSeriesCap; ++n) {
      cplx t = un / (1.0 + rp);
      acc += t;
      peak = std::max(peak, std::abs(t));
      double bound = std::pow(a, n + 1) / (1.0 - a);
      if (bound < 1e-16 * std::max(peak, std::abs(acc))) {
        fwd_tail = bound;
        break;
      }
      fwd_tail = bound;
      un *= u;
      rp *= r_ * r_;
    }
  }

  // Backward branch: u^{-m}/(1 + r^{1-2m}) = (r^2/u)^m (1/r) / (1 + r^{2m-1}),
  // m >= 1; ratio |r^2/u| < 1 inside the annulus.
  double bwd_tail = 0;
  {
    const cplx b = (r_ * r_) / u;
    const double bb = std::abs(b);
    cplx qm = b;      // (r^2/u)^m
    double s = r_;    // r^{2m-1}
    for (int m = 1; m < kSeriesCap; ++m) {
      cplx t = qm * (1.0 / r_) / (1.0 + s);
      acc += t;
      peak = std::max(peak, std::abs(t));
      double bound = std::pow(bb, m + 1) / (r_ * (1.0 - bb));
      if (bound < 1e-16 * std::max(peak, std::abs(acc))) {
        bwd_tail = bound;
        break;
      }
      bwd_tail = bound;
      qm *= b;
      s *= r_ * r_;
    }
  }

  tail_ = (fwd_tail + bwd_tail) / TWO_PI;
  return acc / TWO_PI;
}

cplx AnnulusOracle::bergman(cplx z, cplx w) const {
  const cplx u = z * std::conj(w);
  const double a = std::abs(u);

  cplx acc = u == cplx(0) ? cplx(0) : (1.0 / u) / (TWO_PI * std::log(1.0 / r_));
  double peak = std::abs(acc);

  double fwd_tail = 0;
  {
    cplx un = 1.0;
    double rp = r_ * r_;  // r^{2n+2}
    for (int n = 0; n < kSeriesCap; ++n) {
      cplx t = double(n + 1) * un / (PI * (1.0 - rp));
      acc += t;
      peak = std::max(peak, std::abs(t));
      double x = std::pow(a, n + 1);
      double bound = (n + 2) * x / ((1.0 - a) * (1.0 - a) * PI);
      if (bound < 1e-16 * std::max(peak, std::abs(acc))) {
        fwd_tail = bound;
        break;
      }
      fwd_tail = bound;
      un *= u;
      rp *= r_ * r_;
    }
  }

  // m = -n >= 2: (n+1)u^n/(pi(1 - r^{2n+2})) = (m-1)(r^2/u)^m r^{-2} / (pi(1 - r^{2m-2})).
  double bwd_tail = 0;
  {
    const cplx b = (r_ * r_) / u;
    const double bb = std::abs(b);
    cplx qm = b * b;        // (r^2/u)^m from m = 2
    double s = r_ * r_;     // r^{2m-2}
    for (int m = 2; m < kSeriesCap; ++m) {
      cplx t = double(m - 1) * qm / (r_ * r_ * PI * (1.0 - s));
      acc += t;
      peak = std::max(peak, std::abs(t));
      double x = std::pow(bb, m + 1);
      double bound = (m + 1) * x / (r_ * r_ * PI * (1.0 - bb) * (1.0 - bb));
      if (bound < 1e-16 * std::max(peak, std::abs(acc))) {
        bwd_tail = bound;
        break;
      }
      bwd_tail = bound;
      qm *= b;
      s *= r_ * r_;
    }
  }

  tail_ = fwd_tail + bwd_tail;
  return acc;
}

double AnnulusOracle::harmonic_measure_inner(cplx z) const {
  return std::log(std::abs(z)) / std::log(r_);
}

cplx AnnulusOracle::f1_prime(cplx z) const { return 1.0 / (z * std::log(r_)); }

double AnnulusOracle::period11() const { return -TWO_PI / std::log(r_); }

cplx AnnulusOracle::szego_zero(cplx a) const {
  // Coarse polar scan, then Newton with a central-difference derivative.
  cplx best = 0;
  double best_val = std::numeric_limits<double>::max();
  const int nr = 40, nt = 96;
  for (int i = 0; i < nr; ++i) {
    double rho = r_ * std::pow(1.0 / r_, (i + 0.5) / nr);
    for (int j = 0; j < nt; ++j) {
      double th = TWO_PI * j / nt;
      cplx z = std::polar(rho, th);
      double v = std::abs(szego(z, a));
      if (v < best_val) {
        best_val = v;
        best = z;
      }
    }
  }
  cplx z = best;
  const double h = 1e-7;
  for (int it = 0; it < 60; ++it) {
    cplx f = szego(z, a);
    cplx df = (szego(z + h, a) - szego(z - h, a)) / (2 * h);
    cplx step = f / df;
    z -= step;
    if (std::abs(step) < 1e-14) break;
  }
  double m = std::abs(z);
  if (!(m > r_ && m < 1.0))
    throw AmbiguityError("annulus szego zero: refinement left the annulus");
  return z;
}

Domain disc_domain(int grid, double R, cplx center) {
  return Domain({Curve({cplx(0), center, cplx(R)})}, grid);
}

Domain annulus_domain(double r, int grid) {
  Curve inner({cplx(0), cplx(0), cplx(r)});
  Curve outer({cplx(0), cplx(0), cplx(1)});
  return Domain({inner, outer}, grid);
}

Domain blob_domain(int n_curves, std::uint64_t seed, int grid) {
  if (n_curves < 1) throw ConstructionError("blob domain: need at least one curve");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int attempt = 0; attempt < 40; ++attempt) {
    std::vector<Curve> curves;

    const int deg = 6;
    std::vector<cplx> outer(2 * deg + 1, cplx(0));
    outer[deg + 1] = 1.0;
    for (int m = -deg; m <= deg; ++m) {
      if (m == 0 || m == 1) continue;
      double amp = 0.06 * std::pow(0.5, std::abs(m));
      outer[deg + m] = amp * cplx(u(rng), u(rng));
    }

    const int n_inner = n_curves - 1;
    std::vector<std::vector<cplx>> inners;
    for (int j = 0; j < n_inner; ++j) {
      double ang = n_inner == 1 ? 0.0 : TWO_PI * j / n_inner;
      ang += 0.1 * u(rng);
      cplx center = n_inner == 1 ? cplx(0.05 * u(rng), 0.05 * u(rng))
                                 : std::polar(0.45, ang);
      double rho = 0.16 + 0.03 * u(rng);
      const int ideg = 3;
      std::vector<cplx> cs(2 * ideg + 1, cplx(0));
      cs[ideg] = center;
      cs[ideg + 1] = rho;
      for (int m = -ideg; m <= ideg; ++m) {
        if (m == 0 || m == 1) continue;
        double amp = 0.12 * rho * std::pow(0.5, std::abs(m));
        cs[ideg + m] = amp * cplx(u(rng), u(rng));
      }
      inners.push_back(std::move(cs));
    }

    try {
      for (auto& cs : inners) curves.emplace_back(std::move(cs));
      curves.emplace_back(std::move(outer));
      Domain dom(std::move(curves), grid);
      bool clear = true;
      for (int k = 0; k < dom.connectivity() && clear; ++k)
        if (dom.connectivity() > 1 &&
            dom.min_curve_clearance(k) < 0.06 * dom.diameter())
          clear = false;
      if (!clear) continue;
      return dom;
    } catch (const ConstructionError&) {
      continue;
    } catch (const AmbiguityError&) {
      continue;
    }
  }
  throw ConstructionError("blob domain: no valid configuration within the retry budget");
}

}  // namespace qdzip
