#include "qdzip/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qdzip {
namespace {

double factorial(int m) {
  double f = 1;
  for (int k = 2; k <= m; ++k) f *= k;
  return f;
}

// Cauchy-type kernel (1/2pi i) T(w)/(w - z) evaluated at nodes.
cplx hker(cplx z, cplx w, cplx tw) { return (tw / (w - z)) / cplx(0, TWO_PI); }

}  // namespace

KSOperator::KSOperator(const Domain& dom, unsigned threads) : dom_(&dom) {
  const int n = dom.connectivity();
  const int N = dom.grid();
  const int M = n * N;
  const double h = TWO_PI / N;

  std::vector<cplx> z(M), tg(M);
  sqrtw_.resize(M);
  for (int k = 0; k < n; ++k) {
    auto pts = dom.points(k);
    auto dps = dom.dpoints(k);
    auto sps = dom.speeds(k);
    for (int i = 0; i < N; ++i) {
      z[k * N + i] = pts[i];
      tg[k * N + i] = dps[i] / sps[i];
      sqrtw_[k * N + i] = std::sqrt(sps[i] * h);
    }
  }

  m_.resize(M, M);
  // Writing C for the boundary Cauchy operator, the Hardy-space trace obeys
  // C* s = c_a while C s = s, so (I - (C - C*)) s = c_a: the smooth
  // skew-Hermitian difference kernel enters with a minus sign. On a disc it
  // vanishes identically, so only multi-curve domains see the sign at all.
  // The kernel difference below is exactly skew-Hermitian entrywise, so the
  // weighted matrix is too; rows are independent, any thread count gives the
  // same bits.
  parallel_for(M, threads, [&](std::size_t i) {
    // Diagonal: identity plus the coincidence limit of the difference kernel.
    // Expanding both Cauchy kernels along the curve shows the curvature terms
    // cancel exactly, so that limit is zero and the diagonal is plain 1.
    m_(i, i) = 1.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(M); ++j) {
      if (j == i) continue;
      cplx a = std::conj(hker(z[j], z[i], tg[i])) - hker(z[i], z[j], tg[j]);
      m_(i, j) = sqrtw_[i] * sqrtw_[j] * a;
    }
  });

  skew_residual_ = 0;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      skew_residual_ = std::max(skew_residual_, std::abs(m_(i, j) + std::conj(m_(j, i))));

  lu_.compute(m_);

  // One-norm of the matrix times a probed lower bound on the inverse norm.
  double norm1 = 0;
  for (int j = 0; j < M; ++j) {
    double s = 0;
    for (int i = 0; i < M; ++i) s += std::abs(m_(i, j));
    norm1 = std::max(norm1, s);
  }
  std::mt19937_64 rng(0x5eed00f1u);
  double inv1 = 0;
  for (int probe = 0; probe < 8; ++probe) {
    Eigen::VectorXcd v(M);
    for (int i = 0; i < M; ++i)
      v(i) = cplx(rng() & 1 ? 1.0 : -1.0, rng() & 1 ? 1.0 : -1.0);
    Eigen::VectorXcd s = lu_.solve(v);
    inv1 = std::max(inv1, s.lpNorm<1>() / v.lpNorm<1>());
  }
  cond_estimate_ = norm1 * inv1;
}

BoundaryFunction KSOperator::solve(const BoundaryFunction& rhs) const {
  const int n = dom_->connectivity();
  const int N = dom_->grid();
  const int M = n * N;
  Eigen::VectorXcd b(M);
  for (int k = 0; k < n; ++k) {
    auto s = rhs.samples(k);
    for (int i = 0; i < N; ++i) b(k * N + i) = sqrtw_[k * N + i] * s[i];
  }
  Eigen::VectorXcd y = lu_.solve(b);
  std::vector<std::vector<cplx>> out(n, std::vector<cplx>(N));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < N; ++i) out[k][i] = y(k * N + i) / sqrtw_[k * N + i];
  return BoundaryFunction(*dom_, std::move(out));
}

SzegoField::SzegoField(const Domain& dom, cplx a, BoundaryFunction trace,
                       DerivativeSource deriv_source)
    : dom_(&dom), a_(a), trace_(std::move(trace)), deriv_source_(std::move(deriv_source)) {
  cplx saa = cauchy_eval(trace_, a_);
  if (!(saa.real() > 0) || std::abs(saa.imag()) > 1e-6 * saa.real())
    throw ConstructionError("szego kernel: diagonal value not positive real at base point");
}

cplx SzegoField::eval(cplx z) const { return cauchy_eval(trace_, z); }

cplx SzegoField::eval_derivative(cplx z, int m) const {
  if (m == 0) return eval(z);
  if (!deriv_source_)
    throw ConstructionError(
        "szego kernel: base-point derivatives need a solver-built field");
  return cauchy_eval(deriv_source_(m), z);
}

double SzegoField::at_base() const { return cauchy_eval(trace_, a_).real(); }

GarabedianField::GarabedianField(const SzegoField& s)
    : dom_(&s.trace().domain()),
      a_(s.base()),
      trace_(BoundaryFunction::zeros(*dom_)),
      regular_(BoundaryFunction::zeros(*dom_)) {
  const int n = dom_->connectivity();
  const int N = dom_->grid();
  std::vector<std::vector<cplx>> full(n, std::vector<cplx>(N)), reg(n, std::vector<cplx>(N));
  for (int k = 0; k < n; ++k) {
    auto pts = dom_->points(k);
    auto dps = dom_->dpoints(k);
    auto sps = dom_->speeds(k);
    auto st = s.trace().samples(k);
    for (int i = 0; i < N; ++i) {
      cplx tg = dps[i] / sps[i];
      cplx l = cplx(0, 1) * std::conj(st[i]) * std::conj(tg);
      full[k][i] = l;
      reg[k][i] = l - 1.0 / (TWO_PI * (pts[i] - a_));
    }
  }
  trace_ = BoundaryFunction(*dom_, std::move(full));
  regular_ = BoundaryFunction(*dom_, std::move(reg));
}

cplx GarabedianField::eval(cplx z) const {
  return 1.0 / (TWO_PI * (z - a_)) + cauchy_eval(regular_, z);
}

double GarabedianField::min_boundary_modulus() const {
  double m = std::numeric_limits<double>::max();
  for (int k = 0; k < dom_->connectivity(); ++k)
    for (cplx v : trace_.samples(k)) m = std::min(m, std::abs(v));
  return m;
}

AhlforsMap::AhlforsMap(const SzegoField& s, const GarabedianField& l)
    : dom_(&s.trace().domain()), a_(s.base()), trace_(BoundaryFunction::zeros(*dom_)) {
  const int n = dom_->connectivity();
  const int N = dom_->grid();
  std::vector<std::vector<cplx>> f(n, std::vector<cplx>(N));
  for (int k = 0; k < n; ++k) {
    auto st = s.trace().samples(k);
    auto lt = l.trace().samples(k);
    for (int i = 0; i < N; ++i) f[k][i] = st[i] / lt[i];
  }
  trace_ = BoundaryFunction(*dom_, std::move(f));
}

cplx AhlforsMap::eval(cplx z) const { return cauchy_eval(trace_, z); }

cplx AhlforsMap::derivative_at_base() const {
  return cauchy_derivative_eval(trace_, a_, 1);
}

double AhlforsMap::max_modulus_defect() const {
  double d = 0;
  for (int k = 0; k < dom_->connectivity(); ++k)
    for (cplx v : trace_.samples(k)) d = std::max(d, std::abs(std::abs(v) - 1.0));
  return d;
}

int AhlforsMap::boundary_winding() const { return trace_winding(trace_); }

KernelSolver::KernelSolver(const Domain& dom, unsigned threads)
    : dom_(&dom), ks_(dom, threads) {}

const BoundaryFunction& KernelSolver::szego_trace(cplx w, int m) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_tuple(w.real(), w.imag(), m);
  auto it = memo_.find(key);
  if (it != memo_.end()) return *it->second;

  if (dom_->locate(w) != Domain::Location::inside)
    throw ConstructionError("szego solve: base point not strictly inside the domain");

  const int n = dom_->connectivity();
  const int N = dom_->grid();
  const double fm = factorial(m);
  std::vector<std::vector<cplx>> rhs(n, std::vector<cplx>(N));
  for (int k = 0; k < n; ++k) {
    auto pts = dom_->points(k);
    auto dps = dom_->dpoints(k);
    auto sps = dom_->speeds(k);
    for (int i = 0; i < N; ++i) {
      cplx tg = dps[i] / sps[i];
      cplx pole = std::pow(pts[i] - w, m + 1);
      rhs[k][i] = std::conj((fm / cplx(0, TWO_PI)) * tg / pole);
    }
  }
  auto sol = std::make_unique<BoundaryFunction>(ks_.solve(BoundaryFunction(*dom_, std::move(rhs))));
  auto [pos, inserted] = memo_.emplace(key, std::move(sol));
  return *pos->second;
}

SzegoField KernelSolver::szego(cplx a) const {
  return SzegoField(*dom_, a, szego_trace(a, 0),
                    [this, a](int m) -> const BoundaryFunction& { return szego_trace(a, m); });
}

GarabedianField KernelSolver::garabedian(cplx a) const {
  SzegoField s = szego(a);
  return GarabedianField(s);
}

AhlforsMap KernelSolver::ahlfors(cplx a) const {
  SzegoField s = szego(a);
  GarabedianField l(s);
  return AhlforsMap(s, l);
}

std::vector<cplx> KernelSolver::szego_zeros(cplx a) const {
  SzegoField s = szego(a);
  int count = trace_winding(s.trace());
  if (count != dom_->connectivity() - 1)
    throw AmbiguityError("szego zeros: boundary winding disagrees with connectivity");
  if (count == 0) return {};
  // Keep the excluded rim band thin: interior evaluation stays accurate down
  // to about a thousandth of the diameter, and kernel zeros can sit fairly
  // close to the boundary.
  double margin = 0.005 * dom_->diameter();
  auto region = SearchRegion::domain_interior(*dom_, margin);
  ZeroSearchOptions opt;
  opt.scale = dom_->diameter();
  opt.edge_resolution = 1e-3;
  return locate_zeros([&](cplx z) { return s.eval(z); }, region, count, opt);
}

int trace_winding(const BoundaryFunction& f) {
  const Domain& dom = f.domain();
  int total = 0;
  for (int k = 0; k < dom.connectivity(); ++k) {
    std::vector<cplx> s(f.samples(k).begin(), f.samples(k).end());
    for (int attempt = 0;; ++attempt) {
      double arg_sum = 0;
      bool ok = true;
      for (std::size_t i = 0; i < s.size(); ++i) {
        cplx a = s[i], b = s[(i + 1) % s.size()];
        if (std::abs(a) == 0 || std::abs(b) == 0) {
          ok = false;
          break;
        }
        double step = std::arg(b / a);
        if (std::abs(step) > PI / 2) {
          ok = false;
          break;
        }
        arg_sum += step;
      }
      if (ok) {
        double turns = arg_sum / TWO_PI;
        if (std::abs(turns - std::round(turns)) > 0.1)
          throw AmbiguityError("trace winding: phase increments do not close to an integer");
        total += static_cast<int>(std::lround(turns));
        break;
      }
      if (attempt >= 4)
        throw AmbiguityError("trace winding: phase step too large after refinement");
      s = f.upsampled(k, 1 << (attempt + 1));
    }
  }
  return total;
}

}  // namespace qdzip
