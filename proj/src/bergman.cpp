#include "qdzip/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qdzip {

BergmanKernel::BergmanKernel(const KernelSolver& solver, unsigned threads)
    : dom_(&solver.domain()), solver_(&solver) {
  const int n = dom_->connectivity();
  const int holes = n - 1;

  double maxspeed = 0;
  for (int k = 0; k < n; ++k) maxspeed = std::max(maxspeed, dom_->curve(k).max_speed());
  collar_ = std::max(0.004 * dom_->diameter(), 6.0 * TWO_PI * maxspeed / 16384.0);

  p_.resize(holes, holes);
  a_.resize(holes, holes);
  if (holes == 0) return;

  DirichletSolver dirichlet(*dom_, threads);
  for (int k = 0; k < holes; ++k) measures_.push_back(dirichlet.measure(k));
  for (int k = 0; k < holes; ++k) fields_.emplace_back(*dom_, measures_[k], k);
  p_ = period_matrix(*dom_, measures_);

  // Scattered interior samples at comfortable depth for the least-squares
  // collapse of the w-dependence.
  const int m = 8 * holes;
  std::vector<cplx> samples;
  {
    std::mt19937_64 rng(0xa11ce5u);
    double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
    auto pts = dom_->points(dom_->outer_index());
    for (cplx z : pts) {
      lo_re = std::min(lo_re, z.real());
      hi_re = std::max(hi_re, z.real());
      lo_im = std::min(lo_im, z.imag());
      hi_im = std::max(hi_im, z.imag());
    }
    std::uniform_real_distribution<double> ux(lo_re, hi_re), uy(lo_im, hi_im);
    const double depth = 0.1 * dom_->diameter();
    int guard = 0;
    while (static_cast<int>(samples.size()) < m && guard++ < 100000) {
      cplx w(ux(rng), uy(rng));
      if (dom_->locate(w) != Domain::Location::inside) continue;
      if (dom_->distance_to_boundary(w) < depth) continue;
      samples.push_back(w);
    }
    if (static_cast<int>(samples.size()) < m)
      throw ConstructionError("bergman coefficients: interior sampling failed");
  }

  // Identity used per sample w: F_k'(w) - 4pi conj(q_k(w)) = sum_j C_kj F_j'(w)
  // with q_k(w) = (1/i) contour integral of S(.,w)^2 over inner curve k and
  // C = P conj(A).
  Eigen::MatrixXcd phi(m, holes), lhs(m, holes);
  for (int s = 0; s < m; ++s) {
    cplx w = samples[s];
    const BoundaryFunction& st = solver_->szego_trace(w);
    std::vector<std::vector<cplx>> sq;
    for (int k = 0; k < n; ++k) {
      std::vector<cplx> row(st.samples(k).begin(), st.samples(k).end());
      for (auto& v : row) v *= v;
      sq.push_back(std::move(row));
    }
    BoundaryFunction s2(*dom_, std::move(sq));
    for (int k = 0; k < holes; ++k) {
      cplx qk = integrate_curve(s2, k, Weight::dz) / cplx(0, 1);
      lhs(s, k) = fields_[k].eval(w) - 2.0 * TWO_PI * std::conj(qk);
      phi(s, k) = fields_[k].eval(w);
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(phi);
  Eigen::MatrixXcd ct = qr.solve(lhs);      // phi * ct = lhs, ct = C^T
  collapse_residual_ = (phi * ct - lhs).norm() / std::max(1e-300, lhs.norm());
  Eigen::MatrixXcd c = ct.transpose();
  Eigen::MatrixXcd a_raw = (p_.cast<cplx>().partialPivLu().solve(c)).conjugate();
  asym_ = (a_raw - a_raw.adjoint()).cwiseAbs().maxCoeff();
  if (asym_ > 1e-3)
    throw ConstructionError("bergman coefficients: coupling matrix far from Hermitian");
  a_ = 0.5 * (a_raw + a_raw.adjoint());
}

cplx BergmanKernel::eval(cplx z, cplx w) const {
  const BoundaryFunction& st = solver_->szego_trace(w);
  cplx s = cauchy_eval(st, z);
  cplx k = 2.0 * TWO_PI * s * s;
  const int holes = field_count();
  for (int i = 0; i < holes; ++i)
    for (int j = 0; j < holes; ++j)
      k += a_(i, j) * fields_[i].eval(z) * std::conj(fields_[j].eval(w));
  return k;
}

cplx BergmanKernel::eval_robust(cplx z, cplx w) const {
  if (dom_->distance_to_boundary(z) >= collar_) return eval(z, w);
  auto near = dom_->nearest_boundary(z);
  const BoundaryFunction& st = solver_->szego_trace(w);
  cplx s = st.eval(near.curve, near.t);
  cplx k = 2.0 * TWO_PI * s * s;
  const int holes = field_count();
  for (int i = 0; i < holes; ++i)
    for (int j = 0; j < holes; ++j)
      k += a_(i, j) * fields_[i].trace().eval(near.curve, near.t) *
           std::conj(fields_[j].eval(w));
  return k;
}

double reproducing_residual(const BergmanKernel& kernel, const std::vector<cplx>& poly,
                            cplx w, int grid, unsigned threads) {
  const Domain& dom = kernel.domain();
  auto eval_poly = [&](cplx z) {
    cplx acc = 0;
    for (int d = static_cast<int>(poly.size()) - 1; d >= 0; --d) acc = acc * z + poly[d];
    return acc;
  };

  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (cplx z : dom.points(dom.outer_index())) {
    lo_re = std::min(lo_re, z.real());
    hi_re = std::max(hi_re, z.real());
    lo_im = std::min(lo_im, z.imag());
    hi_im = std::max(hi_im, z.imag());
  }
  const double hx = (hi_re - lo_re) / grid, hy = (hi_im - lo_im) / grid;

  // Midpoint rule, cells included when the center lies inside. Row partial
  // sums are reduced in row order so the result is thread-count independent.
  std::vector<cplx> rows(grid, cplx(0));
  parallel_for(grid, threads, [&](std::size_t iy) {
    cplx acc = 0;
    double y = lo_im + (iy + 0.5) * hy;
    for (int ix = 0; ix < grid; ++ix) {
      cplx z(lo_re + (ix + 0.5) * hx, y);
      bool inside;
      try {
        inside = dom.locate(z, 0.0) == Domain::Location::inside;
      } catch (const AmbiguityError&) {
        continue;  // center indistinguishable from the boundary: skip the cell
      }
      if (!inside) continue;
      acc += eval_poly(z) * std::conj(kernel.eval_robust(z, w));
    }
    rows[iy] = acc;
  });
  cplx integral = 0;
  for (cplx r : rows) integral += r;
  integral *= hx * hy;

  cplx expected = eval_poly(w);
  return std::abs(integral - expected) / std::max(1.0, std::abs(expected));
}

}  // namespace qdzip
