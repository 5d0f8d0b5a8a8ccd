#include "qdzip/harmonic.hpp"

#include <algorithm>
#include <cmath>

namespace qdzip {

HarmonicField::HarmonicField(const Domain& dom, BoundaryFunction density,
                             std::vector<double> charges, std::vector<cplx> sources)
    : dom_(&dom),
      density_(std::move(density)),
      charges_(std::move(charges)),
      sources_(std::move(sources)) {}

double HarmonicField::eval(cplx z) const {
  double u = cauchy_eval(density_, z).real();
  for (std::size_t l = 0; l < charges_.size(); ++l)
    u += charges_[l] * std::log(std::abs(z - sources_[l]));
  return u;
}

DirichletSolver::DirichletSolver(const Domain& dom, unsigned threads) : dom_(&dom) {
  const int n = dom.connectivity();
  const int N = dom.grid();
  const int holes = n - 1;
  const int M = n * N + holes;
  const double h = TWO_PI / N;

  for (int l = 0; l < holes; ++l) sources_.push_back(dom.centroid(l));

  std::vector<cplx> z(n * N), dz(n * N), ddz(n * N);
  for (int k = 0; k < n; ++k) {
    auto pts = dom.points(k);
    auto dps = dom.dpoints(k);
    for (int i = 0; i < N; ++i) {
      z[k * N + i] = pts[i];
      dz[k * N + i] = dps[i];
      ddz[k * N + i] = dom.curve(k).derivative(h * i, 2);
    }
  }

  Eigen::MatrixXd m(M, M);
  m.setZero();
  // Collocation rows: jump term + smooth parameter-form kernel (the diagonal
  // limit is (1/4pi) Im[z''/z']) + log-source columns.
  parallel_for(n * N, threads, [&](std::size_t row) {
    cplx zi = z[row];
    for (int col = 0; col < n * N; ++col) {
      double ker;
      if (static_cast<std::size_t>(col) == row)
        ker = (ddz[row] / dz[row]).imag() / (2.0 * TWO_PI);
      else
        ker = (dz[col] / (z[col] - zi)).imag() / TWO_PI;
      m(row, col) = h * ker + (static_cast<std::size_t>(col) == row ? 0.5 : 0.0);
    }
    for (int l = 0; l < holes; ++l)
      m(row, n * N + l) = std::log(std::abs(zi - sources_[l]));
  });
  // Zero-mean constraints for the densities on the inner curves.
  for (int l = 0; l < holes; ++l) {
    auto sps = dom.speeds(l);
    for (int i = 0; i < N; ++i) m(n * N + l, l * N + i) = sps[i] * h;
  }

  lu_.compute(m);
}

HarmonicField DirichletSolver::solve(
    const std::vector<std::vector<double>>& boundary_data) const {
  const int n = dom_->connectivity();
  const int N = dom_->grid();
  const int holes = n - 1;
  if (static_cast<int>(boundary_data.size()) != n)
    throw ConstructionError("dirichlet solve: boundary data curve count mismatch");
  Eigen::VectorXd b(n * N + holes);
  for (int k = 0; k < n; ++k) {
    if (static_cast<int>(boundary_data[k].size()) != N)
      throw ConstructionError("dirichlet solve: boundary data sample count mismatch");
    for (int i = 0; i < N; ++i) b(k * N + i) = boundary_data[k][i];
  }
  for (int l = 0; l < holes; ++l) b(n * N + l) = 0;

  Eigen::VectorXd x = lu_.solve(b);
  std::vector<std::vector<cplx>> mu(n, std::vector<cplx>(N));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < N; ++i) mu[k][i] = x(k * N + i);
  std::vector<double> q(holes);
  for (int l = 0; l < holes; ++l) q[l] = x(n * N + l);
  return HarmonicField(*dom_, BoundaryFunction(*dom_, std::move(mu)), std::move(q),
                       sources_);
}

HarmonicField DirichletSolver::measure(int inner_k) const {
  const int n = dom_->connectivity();
  if (inner_k < 0 || inner_k >= n - 1)
    throw ConstructionError("harmonic measure: index must name an inner curve");
  std::vector<std::vector<double>> data(n, std::vector<double>(dom_->grid(), 0.0));
  std::fill(data[inner_k].begin(), data[inner_k].end(), 1.0);
  return solve(data);
}

FPrimeField::FPrimeField(const Domain& dom, const HarmonicField& h, int index)
    : dom_(&dom), field_(&h), index_(index), trace_(BoundaryFunction::zeros(dom)) {
  const int N = dom.grid();
  const double sigma = 5.4 / N;  // coefficient amplification e^{N sigma/2} ~ 15
  std::vector<std::vector<cplx>> tr;
  for (int k = 0; k < dom.connectivity(); ++k)
    tr.push_back(lift_holomorphic_trace(dom.curve(k), N, sigma,
                                        [&](cplx z) { return eval(z); }));
  trace_ = BoundaryFunction(dom, std::move(tr));
}

cplx FPrimeField::eval(cplx z) const {
  cplx v = cauchy_derivative_eval(field_->density(), z, 1);
  const auto& q = field_->charges();
  const auto& s = field_->sources();
  for (std::size_t l = 0; l < q.size(); ++l) v += q[l] / (z - s[l]);
  return v;
}

Eigen::MatrixXd period_matrix(const Domain& dom,
                              const std::vector<HarmonicField>& measures) {
  const int holes = dom.connectivity() - 1;
  if (static_cast<int>(measures.size()) != holes)
    throw ConstructionError("period matrix: need one harmonic measure per inner curve");
  Eigen::MatrixXd p(holes, holes);
  if (holes == 0) return p;
  for (int k = 0; k < holes; ++k)
    for (int i = 0; i < holes; ++i) p(k, i) = -TWO_PI * measures[k].charges()[i];
  double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6)
    throw ConstructionError("period matrix: symmetry residual above tolerance");
  return 0.5 * (p + p.transpose());
}

}  // namespace qdzip
