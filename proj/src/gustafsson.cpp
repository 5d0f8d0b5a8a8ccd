#include "qdzip/gustafsson.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace qdzip {

namespace {

cplx pow_int(cplx z, int m) {
  cplx r = 1.0;
  for (int i = 0; i < m; ++i) r *= z;
  return r;
}

cplx pole_part(const PoleSum& ps, cplx z) {
  cplx s = 0;
  for (std::size_t j = 0; j < ps.poles.size(); ++j) s += ps.residues[j] / (z - ps.poles[j]);
  return s;
}

// Samples stacked as [sqrt(w_i) f_i ; sqrt(lambda w_i) (df/ds)_i]: the squared
// norm is the weighted boundary integral of |f|^2 + lambda |df/ds|^2.
Eigen::VectorXcd stack_weighted(const BoundaryFunction& f, double lambda) {
  const Domain& dom = f.domain();
  int n = dom.connectivity(), N = dom.grid();
  double h = TWO_PI / N;
  BoundaryFunction df = f.derivative_dt();
  Eigen::VectorXcd v(2 * n * N);
  int half = n * N, idx = 0;
  for (int k = 0; k < n; ++k) {
    auto sp = dom.speeds(k);
    for (int i = 0; i < N; ++i, ++idx) {
      double w = sp[i] * h;
      v[idx] = std::sqrt(w) * f.sample(k, i);
      v[half + idx] = std::sqrt(lambda * w) / sp[i] * df.sample(k, i);
    }
  }
  return v;
}

std::vector<cplx> scattered_pool(const Domain& dom, int g) {
  double lo_re = std::numeric_limits<double>::max(), hi_re = std::numeric_limits<double>::lowest();
  double lo_im = lo_re, hi_im = hi_re;
  for (int k = 0; k < dom.connectivity(); ++k)
    for (const cplx& z : dom.points(k)) {
      lo_re = std::min(lo_re, z.real());
      hi_re = std::max(hi_re, z.real());
      lo_im = std::min(lo_im, z.imag());
      hi_im = std::max(hi_im, z.imag());
    }
  double clear = 0.04 * dom.diameter();
  std::vector<cplx> pool;
  for (int iy = 0; iy < g; ++iy)
    for (int ix = 0; ix < g; ++ix) {
      cplx z(lo_re + (hi_re - lo_re) * (ix + 0.5) / g,
             lo_im + (hi_im - lo_im) * (iy + 0.5) / g);
      if (dom.locate(z, clear) == Domain::Location::inside) pool.push_back(z);
    }
  if (pool.empty()) throw ConstructionError("density fit: empty candidate lattice");
  return pool;
}

std::vector<cplx> clustered_pool(const Domain& dom, cplx w0, double eps,
                                 const FitOptions& opts) {
  if (!(eps > 0) || dom.locate(w0, eps) != Domain::Location::inside)
    throw ConstructionError("confinement disc not compactly inside the domain");
  std::vector<cplx> pool{w0};
  for (int r = 0; r < opts.cluster_rings; ++r) {
    double rho = 0.8 * eps * (r + 1) / opts.cluster_rings;
    double twist = 0.37 * (r + 1);
    for (int j = 0; j < opts.cluster_angles; ++j)
      pool.push_back(w0 + rho * std::exp(cplx(0, TWO_PI * j / opts.cluster_angles + twist)));
  }
  return pool;
}

// Greedy orthogonal matching over the candidate kernel atoms, then one
// truncated-SVD coefficient solve on the selected set.
SzegoFit greedy_fit(const KernelSolver& solver, const BoundaryFunction& target,
                    const std::vector<cplx>& pool, const FitOptions& opts) {
  Eigen::VectorXcd t = stack_weighted(target, opts.deriv_weight);
  double tnorm = t.norm();
  SzegoFit fit;
  if (tnorm == 0) return fit;

  const int rows = static_cast<int>(t.size());
  const int P = static_cast<int>(pool.size());
  Eigen::MatrixXcd atoms(rows, P);
  Eigen::VectorXd atom_norm(P);
  for (int j = 0; j < P; ++j) {
    atoms.col(j) = stack_weighted(solver.szego_trace(pool[j]), opts.deriv_weight);
    atom_norm[j] = atoms.col(j).norm();
  }

  int cap = std::min(opts.max_terms, P);
  Eigen::MatrixXcd q(rows, cap);
  Eigen::VectorXcd r = t;
  std::vector<int> active;
  std::vector<char> used(P, 0);
  double res = 1.0;
  while (static_cast<int>(active.size()) < cap) {
    int best = -1;
    double best_corr = 0;
    for (int j = 0; j < P; ++j) {
      if (used[j] || atom_norm[j] <= 0) continue;
      double corr = std::abs(atoms.col(j).dot(r)) / atom_norm[j];
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    if (best < 0 || best_corr < 1e-15 * tnorm) break;
    used[best] = 1;
    Eigen::VectorXcd col = atoms.col(best);
    int m = static_cast<int>(active.size());
    for (int pass = 0; pass < 2; ++pass)
      if (m > 0) col -= q.leftCols(m) * (q.leftCols(m).adjoint() * col);
    double nq = col.norm();
    if (nq < 1e-10 * atom_norm[best]) continue;  // atom already represented
    col /= nq;
    q.col(m) = col;
    active.push_back(best);
    r -= col * col.dot(r);
    res = r.norm() / tnorm;
    fit.history.push_back(res);
    if (res <= opts.tol) break;
    // Greedy selection over a coherent dictionary plateaus for stretches
    // before dropping again, so only a long dead window stops the loop.
    std::size_t h = fit.history.size();
    if (h >= 24 && fit.history[h - 12] < 1.001 * res) break;  // stagnation
  }
  if (active.empty()) throw ConstructionError("density fit: no usable atoms");

  // The greedy pass is a sparsifier, not the accuracy guarantee: over a
  // coherent pool it can keep grinding out slow gains past any term cap. If
  // it missed the tolerance, promote the whole pool and let the truncated
  // SVD find the best combination the atoms support at working precision.
  if (res > opts.tol) {
    for (int j = 0; j < P; ++j)
      if (!used[j] && atom_norm[j] > 0) active.push_back(j);
  }

  Eigen::MatrixXcd sub(rows, active.size());
  for (std::size_t j = 0; j < active.size(); ++j) sub.col(j) = atoms.col(active[j]);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  Eigen::VectorXcd ut = svd.matrixU().adjoint() * t;
  for (int j = 0; j < sv.size(); ++j)
    ut[j] = sv[j] > opts.svd_cutoff * sv[0] ? ut[j] / sv[j] : cplx(0);
  Eigen::VectorXcd c = svd.matrixV() * ut;
  fit.residual = (sub * c - t).norm() / tnorm;
  for (std::size_t j = 0; j < active.size(); ++j) {
    fit.points.push_back(pool[active[j]]);
    fit.coeffs.push_back(c[j]);
  }
  return fit;
}

BoundaryFunction accumulate_scaled(const Domain& dom,
                                   const std::vector<const BoundaryFunction*>& fs,
                                   const std::vector<cplx>& cs) {
  BoundaryFunction acc = BoundaryFunction::zeros(dom);
  auto& raw = acc.raw();
  for (std::size_t j = 0; j < fs.size(); ++j)
    for (int k = 0; k < dom.connectivity(); ++k) {
      auto src = fs[j]->samples(k);
      for (int i = 0; i < dom.grid(); ++i) raw[k][i] += cs[j] * src[i];
    }
  return acc;
}

Curve refit_curve(const BoundaryFunction& g, int k) {
  std::vector<cplx> spec = g.spectrum(k);
  int N = static_cast<int>(spec.size());
  int cap = N / 4;
  double peak = 0;
  for (const cplx& c : spec) peak = std::max(peak, std::abs(c));
  int deg = 1;
  for (int j = 0; j < N; ++j) {
    int m = fft_freq(j, N);
    if (std::abs(m) <= cap && std::abs(spec[j]) > 1e-12 * peak)
      deg = std::max(deg, std::abs(m));
  }
  std::vector<cplx> coeffs(2 * deg + 1, cplx(0));
  for (int j = 0; j < N; ++j) {
    int m = fft_freq(j, N);
    if (std::abs(m) <= deg) coeffs[m + deg] += spec[j];
  }
  return Curve(std::move(coeffs));
}

// A miss by two orders of magnitude means the dictionary has hit its
// working-precision span, not that a few more greedy terms were needed;
// building a map from such a density would produce a far-from-identity g whose
// failure surfaces later in confusing ways (non-injectivity, bad image
// curves), so reject it here with the direct diagnosis.
void require_fit_converged(const SzegoFit& fit, const FitOptions& opts) {
  if (fit.residual > 100 * opts.tol) {
    std::ostringstream msg;
    msg << "density fit stalled at relative residual " << fit.residual
        << " (tolerance " << opts.tol
        << "): the point pool cannot resolve the target at working precision";
    throw ConstructionError(msg.str());
  }
}

}  // namespace

cplx PoleSum::eval(cplx z) const {
  return pole_part(*this, z) + cauchy_eval(regular, z);
}

GustafssonMap::GustafssonMap(const Domain& dom, Variant variant, cplx a, SzegoFit fit,
                             std::vector<cplx> zeros, std::vector<cplx> cleanup_points,
                             std::vector<cplx> cleanup_coeffs, cplx w0, double eps,
                             BoundaryFunction g_trace, PoleSum refl_num,
                             std::vector<cplx> refl_poles, BoundaryFunction denom_trace,
                             std::optional<PoleSum> denom_poles)
    : dom_(&dom),
      variant_(variant),
      a_(a),
      fit_(std::move(fit)),
      zeros_(std::move(zeros)),
      cleanup_points_(std::move(cleanup_points)),
      cleanup_coeffs_(std::move(cleanup_coeffs)),
      w0_(w0),
      eps_(eps),
      g_trace_(std::move(g_trace)),
      refl_num_(std::move(refl_num)),
      refl_poles_(std::move(refl_poles)),
      denom_trace_(std::move(denom_trace)),
      denom_poles_(std::move(denom_poles)) {
  int n = dom.connectivity(), N = dom.grid();
  BoundaryFunction dg = g_trace_.derivative_dt();
  double vmax = 0, dmax = 0, cmax = 0, nscale = 0;
  cplx shift = variant_ == Variant::scattered ? std::conj(a_) : cplx(0);
  for (int k = 0; k < n; ++k) {
    auto z = dom.points(k);
    auto dz = dom.dpoints(k);
    auto reg = refl_num_.regular.samples(k);
    auto den = denom_trace_.samples(k);
    for (int i = 0; i < N; ++i) {
      vmax = std::max(vmax, std::abs(g_trace_.sample(k, i) - z[i]));
      dmax = std::max(dmax, std::abs(dg.sample(k, i) / dz[i] - 1.0));
      // Compare numerators: refl - conj(g) times the denominator trace. The
      // denominator can pass through near-zeros on the boundary, where the
      // quotient form would amplify harmless roundoff into a large pointwise
      // gap. Normalize by the cancellation mass (absolute sum of pole terms):
      // the density coefficients can be huge with the sum cancelling to O(1),
      // and each kernel trace only carries the sum to solver accuracy.
      cplx lhs = reg[i];
      double mass = std::abs(reg[i]);
      for (std::size_t p = 0; p < refl_num_.poles.size(); ++p) {
        cplx term = refl_num_.residues[p] / (z[i] - refl_num_.poles[p]);
        lhs += term;
        mass += std::abs(term);
      }
      cplx rhs = (std::conj(g_trace_.sample(k, i)) - shift) * den[i];
      cmax = std::max(cmax, std::abs(lhs - rhs));
      nscale = std::max(nscale, std::max(mass, std::abs(rhs)));
    }
  }
  id_defect_ = vmax + dmax;
  conj_defect_ = nscale > 0 ? cmax / nscale : cmax;
  // On the boundary conj(g) equals the reflected extension identically — the
  // equality follows from the kernel conjugation identities alone and does
  // not depend on how well the density fit approximates its target — so any
  // visible defect is structural breakage, not fit looseness.
  if (conj_defect_ > 1e-8)
    throw ConstructionError("reflected extension mismatches conj(g) on the boundary");

  // image boundary must survive re-fitting as a valid domain
  try {
    std::vector<Curve> img;
    for (int k = 0; k < n; ++k) img.push_back(refit_curve(g_trace_, k));
    image_ = std::make_shared<Domain>(std::move(img), N);
  } catch (const std::exception& e) {
    throw ConstructionError(std::string("image boundary failed validation: ") + e.what());
  }

  // injectivity: each probe value must have exactly one preimage
  std::vector<cplx> probes{a_};
  if (!fit_.points.empty()) {
    probes.push_back(fit_.points.front());
    probes.push_back(fit_.points.back());
  }
  int checked = 0;
  for (cplx zp : probes) {
    cplx wp = cauchy_eval(g_trace_, zp);
    BoundaryFunction shifted = g_trace_;
    for (auto& curve_samples : shifted.raw())
      for (cplx& s : curve_samples) s -= wp;
    try {
      if (trace_winding(shifted) != 1)
        throw ConstructionError("map is not injective (preimage count != 1)");
      ++checked;
    } catch (const AmbiguityError&) {
      // probe image too close to the image boundary; try the others
    }
  }
  if (checked == 0)
    throw ConstructionError("injectivity check: no probe could be resolved");
}

cplx GustafssonMap::eval(cplx z) const { return cauchy_eval(g_trace_, z); }

cplx GustafssonMap::derivative(cplx z) const {
  return cauchy_derivative_eval(g_trace_, z, 1);
}

cplx GustafssonMap::refl_eval(cplx z) const {
  cplx num = refl_num_.eval(z);
  cplx den = denom_poles_ ? denom_poles_->eval(z) : cauchy_eval(denom_trace_, z);
  cplx shift = variant_ == Variant::scattered ? std::conj(a_) : cplx(0);
  return shift + num / den;
}

const Domain& GustafssonMap::image_domain() const { return *image_; }

GustafssonMap build_map_scattered(const KernelSolver& solver, cplx a,
                                  const FitOptions& opts) {
  const Domain& dom = solver.domain();
  SzegoField sa = solver.szego(a);
  GarabedianField la(sa);
  int n = dom.connectivity(), N = dom.grid();

  BoundaryFunction target = BoundaryFunction::zeros(dom);
  for (int k = 0; k < n; ++k) {
    auto z = dom.points(k);
    auto lt = la.trace().samples(k);
    for (int i = 0; i < N; ++i) target.raw()[k][i] = (z[i] - a) * lt[i];
  }

  SzegoFit fit = greedy_fit(solver, target, scattered_pool(dom, opts.lattice), opts);
  require_fit_converged(fit, opts);
  std::vector<cplx> zeros = solver.szego_zeros(a);

  std::vector<const BoundaryFunction*> parts;
  for (cplx b : fit.points) parts.push_back(&solver.szego_trace(b));
  BoundaryFunction lam = accumulate_scaled(dom, parts, fit.coeffs);

  BoundaryFunction g = BoundaryFunction::zeros(dom);
  for (int k = 0; k < n; ++k) {
    auto lt = la.trace().samples(k);
    for (int i = 0; i < N; ++i)
      g.raw()[k][i] = a + lam.sample(k, i) / lt[i];
  }

  std::vector<cplx> residues;
  std::vector<const BoundaryFunction*> reg_parts;
  std::vector<cplx> reg_coeffs;
  std::vector<GarabedianField> lb;
  lb.reserve(fit.points.size());
  for (std::size_t j = 0; j < fit.points.size(); ++j)
    lb.emplace_back(solver.szego(fit.points[j]));
  for (std::size_t j = 0; j < fit.points.size(); ++j) {
    residues.push_back(std::conj(fit.coeffs[j]) / TWO_PI);
    reg_parts.push_back(&lb[j].regular_trace());
    reg_coeffs.push_back(std::conj(fit.coeffs[j]));
  }
  PoleSum num{fit.points, residues, accumulate_scaled(dom, reg_parts, reg_coeffs)};

  std::vector<cplx> poles = fit.points;
  poles.insert(poles.end(), zeros.begin(), zeros.end());

  return GustafssonMap(dom, GustafssonMap::Variant::scattered, a, std::move(fit),
                       std::move(zeros), {}, {}, cplx(0), 0.0, std::move(g),
                       std::move(num), std::move(poles), sa.trace(), std::nullopt);
}

GustafssonMap build_map_clustered(const KernelSolver& solver, cplx a, cplx w0,
                                  double eps, const FitOptions& opts) {
  const Domain& dom = solver.domain();
  SzegoField sa = solver.szego(a);
  GarabedianField la(sa);
  int n = dom.connectivity(), N = dom.grid();

  BoundaryFunction target = BoundaryFunction::zeros(dom);
  for (int k = 0; k < n; ++k) {
    auto z = dom.points(k);
    auto st = sa.trace().samples(k);
    for (int i = 0; i < N; ++i) target.raw()[k][i] = z[i] * st[i];
  }

  SzegoFit fit = greedy_fit(solver, target, clustered_pool(dom, w0, eps, opts), opts);
  require_fit_converged(fit, opts);
  std::vector<cplx> zeros = solver.szego_zeros(a);
  std::vector<cplx> bases{a};
  bases.insert(bases.end(), zeros.begin(), zeros.end());

  std::vector<const BoundaryFunction*> parts;
  for (cplx b : fit.points) parts.push_back(&solver.szego_trace(b));
  BoundaryFunction lam = accumulate_scaled(dom, parts, fit.coeffs);

  // cleanup points inside the confinement disc cancel the Szego-zero poles of
  // 1/S(., a) and pin g(a) = a; retried with rotated placements if singular
  int nb = static_cast<int>(bases.size());
  std::vector<cplx> B(nb);
  Eigen::VectorXcd mu(nb);
  bool solved = false;
  for (int attempt = 0; attempt < 4 && !solved; ++attempt) {
    double phase = 0.4 + 0.7 * attempt;
    for (int k = 0; k < nb; ++k)
      B[k] = w0 + 0.45 * eps * std::exp(cplx(0, TWO_PI * k / nb + phase));
    Eigen::MatrixXcd M(nb, nb);
    Eigen::VectorXcd rhs(nb);
    for (int j = 0; j < nb; ++j) {
      for (int k = 0; k < nb; ++k)
        M(j, k) = cauchy_eval(solver.szego_trace(B[k]), bases[j]);
      rhs[j] = cauchy_eval(lam, bases[j]) -
               bases[j] * cauchy_eval(sa.trace(), bases[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (lu.rank() < nb) continue;
    mu = lu.solve(rhs);
    double resid = (M * mu - rhs).norm();
    if (resid <= 1e-8 * std::max(1.0, rhs.norm())) solved = true;
  }
  if (!solved) throw ConstructionError("cleanup system singular for all placements");

  std::vector<const BoundaryFunction*> bparts;
  std::vector<cplx> bcoeffs(nb);
  for (int k = 0; k < nb; ++k) {
    bparts.push_back(&solver.szego_trace(B[k]));
    bcoeffs[k] = -mu[k];
  }
  BoundaryFunction numer = lam + accumulate_scaled(dom, bparts, bcoeffs);

  BoundaryFunction g = BoundaryFunction::zeros(dom);
  for (int k = 0; k < n; ++k) {
    auto st = sa.trace().samples(k);
    for (int i = 0; i < N; ++i)
      g.raw()[k][i] = numer.sample(k, i) / st[i];
  }

  std::vector<cplx> poles = fit.points;
  std::vector<cplx> residues;
  std::vector<const BoundaryFunction*> reg_parts;
  std::vector<cplx> reg_coeffs;
  std::vector<GarabedianField> lfields;
  lfields.reserve(fit.points.size() + nb);
  for (cplx b : fit.points) lfields.emplace_back(solver.szego(b));
  for (cplx b : B) lfields.emplace_back(solver.szego(b));
  for (std::size_t j = 0; j < fit.points.size(); ++j) {
    residues.push_back(std::conj(fit.coeffs[j]) / TWO_PI);
    reg_parts.push_back(&lfields[j].regular_trace());
    reg_coeffs.push_back(std::conj(fit.coeffs[j]));
  }
  for (int k = 0; k < nb; ++k) {
    poles.push_back(B[k]);
    residues.push_back(-std::conj(mu[k]) / TWO_PI);
    reg_parts.push_back(&lfields[fit.points.size() + k].regular_trace());
    reg_coeffs.push_back(-std::conj(mu[k]));
  }
  PoleSum num{poles, residues, accumulate_scaled(dom, reg_parts, reg_coeffs)};

  std::vector<cplx> mu_out(mu.data(), mu.data() + nb);
  PoleSum denom{{a}, {cplx(1.0 / TWO_PI)}, la.regular_trace()};
  return GustafssonMap(dom, GustafssonMap::Variant::clustered, a, std::move(fit),
                       std::move(zeros), B, mu_out, w0, eps, std::move(g),
                       std::move(num), poles, la.trace(), std::move(denom));
}

SzegoFit fit_density_scattered(const KernelSolver& solver, cplx a,
                               const FitOptions& opts) {
  const Domain& dom = solver.domain();
  GarabedianField la(solver.szego(a));
  BoundaryFunction target = BoundaryFunction::zeros(dom);
  for (int k = 0; k < dom.connectivity(); ++k) {
    auto z = dom.points(k);
    auto lt = la.trace().samples(k);
    for (int i = 0; i < dom.grid(); ++i) target.raw()[k][i] = (z[i] - a) * lt[i];
  }
  return greedy_fit(solver, target, scattered_pool(dom, opts.lattice), opts);
}

SzegoFit fit_density_clustered(const KernelSolver& solver, cplx a, cplx w0,
                               double eps, const FitOptions& opts) {
  const Domain& dom = solver.domain();
  SzegoField sa = solver.szego(a);
  BoundaryFunction target = BoundaryFunction::zeros(dom);
  for (int k = 0; k < dom.connectivity(); ++k) {
    auto z = dom.points(k);
    auto st = sa.trace().samples(k);
    for (int i = 0; i < dom.grid(); ++i) target.raw()[k][i] = z[i] * st[i];
  }
  return greedy_fit(solver, target, clustered_pool(dom, w0, eps, opts), opts);
}

QuadratureData quadrature_data(const GustafssonMap& map) {
  const Domain& dom = map.domain();
  const std::vector<cplx>& poles = map.refl_poles();
  const int K = 256;
  const int kMaxOrder = 3;

  struct Raw {
    cplx node;
    std::array<cplx, 3> p;
  };
  std::vector<Raw> raw(poles.size());
  QuadratureData out;

  for (std::size_t j = 0; j < poles.size(); ++j) {
    cplx p = poles[j];
    double sep = std::numeric_limits<double>::max();
    for (std::size_t l = 0; l < poles.size(); ++l)
      if (l != j) sep = std::min(sep, std::abs(p - poles[l]));
    double rho = 0.3 * std::min(dom.distance_to_boundary(p), 0.5 * sep);
    if (!(rho > 1e-10 * dom.diameter()))
      throw ConstructionError("pole too close to the boundary or to another pole");

    cplx wp = map.eval(p);
    std::array<cplx, 3> prev{};
    std::array<cplx, 3> cur{};
    for (int pass = 0; pass < 2; ++pass) {
      double r = pass == 0 ? rho : rho / 2;
      cur = {cplx(0), cplx(0), cplx(0)};
      for (int l = 0; l < K; ++l) {
        cplx dir = std::exp(cplx(0, TWO_PI * l / K));
        cplx z = p + r * dir;
        cplx f = map.refl_eval(z) * map.derivative(z) * (r / K) * dir;
        cplx d = map.eval(z) - wp;
        for (int m = 0; m < kMaxOrder; ++m) {
          cur[m] += f;
          f *= d;
        }
      }
      if (pass == 0) prev = cur;
    }
    for (int m = 0; m < kMaxOrder; ++m)
      out.radius_sweep_defect = std::max(out.radius_sweep_defect, std::abs(cur[m] - prev[m]));
    out.max_order2_coeff = std::max(out.max_order2_coeff, std::abs(cur[1]));
    raw[j] = {wp, cur};
  }

  double gscale = 0;
  for (const Raw& r : raw) gscale = std::max(gscale, std::abs(r.p[0]));
  double order_tol = 1e-8 * std::max(1.0, gscale);

  double merge_tol = 1e-9 * dom.diameter();
  std::vector<QuadratureNode> nodes;
  for (const Raw& r : raw) {
    int order = 1;
    for (int m = kMaxOrder; m >= 1; --m)
      if (std::abs(r.p[m - 1]) > order_tol) {
        order = m;
        break;
      }
    std::vector<cplx> weights(order);
    double fact = 1;
    for (int k = 0; k < order; ++k) {
      if (k > 0) fact *= k;
      weights[k] = PI * r.p[k] / fact;
    }
    QuadratureNode* host = nullptr;
    for (QuadratureNode& n : nodes)
      if (std::abs(n.node - r.node) < merge_tol) {
        host = &n;
        break;
      }
    if (host) {
      if (host->weights.size() < weights.size()) host->weights.resize(weights.size(), cplx(0));
      for (std::size_t k = 0; k < weights.size(); ++k) host->weights[k] += weights[k];
    } else {
      nodes.push_back({r.node, std::move(weights)});
    }
  }

  double drop_tol = 1e-12 * dom.area();
  for (QuadratureNode& n : nodes) {
    double big = 0;
    for (cplx w : n.weights) big = std::max(big, std::abs(w));
    if (big < drop_tol) {
      ++out.dropped_nodes;
      continue;
    }
    if (map.image_domain().locate(n.node, 0.0) != Domain::Location::inside)
      throw ConstructionError("quadrature node escaped the image domain");
    out.nodes.push_back(std::move(n));
  }
  return out;
}

std::vector<double> verify_quadrature(const GustafssonMap& map,
                                      const QuadratureData& data, int max_degree) {
  const Domain& dom = map.domain();
  const BoundaryFunction& g = map.trace();
  BoundaryFunction dg = g.derivative_dt();
  int n = dom.connectivity(), N = dom.grid();
  double h = TWO_PI / N;

  double rmax = 0;
  for (int k = 0; k < n; ++k)
    for (cplx w : g.samples(k)) rmax = std::max(rmax, std::abs(w));

  std::vector<double> res(max_degree + 1);
  double area_img = 0;
  for (int m = 0; m <= max_degree; ++m) {
    cplx lhs = 0;
    for (int k = 0; k < n; ++k) {
      auto w = g.samples(k);
      auto dw = dg.samples(k);
      cplx acc = 0;
      for (int i = 0; i < N; ++i) acc += pow_int(w[i], m) * std::conj(w[i]) * dw[i];
      lhs += acc * h;
    }
    lhs /= cplx(0, 2);
    if (m == 0) area_img = std::abs(lhs);

    cplx rhs = 0;
    for (const QuadratureNode& node : data.nodes) {
      for (std::size_t k = 0; k < node.weights.size(); ++k) {
        if (static_cast<int>(k) > m) break;
        double fall = 1;
        for (std::size_t i = 0; i < k; ++i) fall *= m - i;
        rhs += node.weights[k] * fall * pow_int(node.node, m - static_cast<int>(k));
      }
    }
    double scale = std::max(std::abs(lhs), area_img * std::pow(rmax, m));
    res[m] = std::abs(lhs - rhs) / scale;
  }
  return res;
}

}  // namespace qdzip
