#include <doctest.h>

#include <cmath>
#include <vector>

#include "qdzip/harmonic.hpp"
#include "qdzip/testdomains.hpp"
#include "test_util.hpp"

using namespace qdzip;
using qdzip_test::dist;

namespace {

std::vector<std::vector<double>> boundary_data(const Domain& dom,
                                               double (*f)(cplx)) {
  std::vector<std::vector<double>> data(dom.connectivity());
  for (int k = 0; k < dom.connectivity(); ++k) {
    auto pts = dom.points(k);
    data[k].resize(dom.grid());
    for (int i = 0; i < dom.grid(); ++i) data[k][i] = f(pts[i]);
  }
  return data;
}

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("dirichlet solve reproduces harmonic polynomials on the disc") {
  Domain dom = disc_domain(256);
  DirichletSolver solver(dom);
  auto exact = [](cplx z) {
    return (z * z).real() + 2 * z.imag() - 1.0;
  };
  HarmonicField u = solver.solve(boundary_data(dom, exact));
  for (cplx z : {cplx(0.3, 0.1), cplx(-0.5, 0.4), cplx(0.0, -0.7)})
    CHECK(u.eval(z) == doctest::Approx(exact(z)).epsilon(1e-8));
}

TEST_CASE("dirichlet solve handles a multiply connected domain") {
  Domain dom = annulus_domain(0.5, 256);
  DirichletSolver solver(dom);
  auto exact = [](cplx z) { return (1.0 / z).real(); };
  HarmonicField u = solver.solve(boundary_data(dom, exact));
  for (cplx z : {cplx(0.7, 0.1), cplx(-0.6, 0.3), cplx(0.0, -0.8)})
    CHECK(u.eval(z) == doctest::Approx(exact(z)).epsilon(1e-8));
}

TEST_CASE("constant data stays constant across the holes") {
  Domain dom = annulus_domain(0.5, 256);
  DirichletSolver solver(dom);
  auto one = [](cplx) { return 1.0; };
  HarmonicField u = solver.solve(boundary_data(dom, one));
  for (cplx z : {cplx(0.55, 0), cplx(0.95, 0), cplx(0, 0.7)})
    CHECK(std::abs(u.eval(z) - 1.0) <= 1e-10);
}

TEST_CASE("harmonic measure of the inner circle is logarithmic") {
  Domain dom = annulus_domain(0.5, 256);
  DirichletSolver solver(dom);
  HarmonicField w = solver.measure(0);
  double lnr = std::log(0.5);
  for (double x : {0.55, 0.7, 0.9})
    CHECK(w.eval(cplx(x, 0)) == doctest::Approx(std::log(x) / lnr).epsilon(1e-8));
  REQUIRE(w.charges().size() == 1);
  CHECK(w.charges()[0] == doctest::Approx(1.0 / lnr).epsilon(1e-8));
  // the completed system keeps the density components mean-free per curve
  for (int k = 0; k < 2; ++k) {
    cplx mean = 0;
    for (int i = 0; i < 256; ++i) mean += w.density().sample(k, i);
    CHECK(std::abs(mean) / 256 <= 1e-10);
  }
}

TEST_CASE("holomorphic measure derivative matches 1/(z ln r)") {
  Domain dom = annulus_domain(0.5, 256);
  DirichletSolver solver(dom);
  HarmonicField w = solver.measure(0);
  FPrimeField fp(dom, w, 0);
  double lnr = std::log(0.5);
  for (cplx z : {cplx(0.7, 0), cplx(-0.55, 0.35), cplx(0.0, 0.9)})
    CHECK(dist(fp.eval(z), 1.0 / (z * lnr)) <= 1e-8);
  CHECK(fp.trace().tail_ratio() <= 1e-6);
  // the trace is the boundary limit of the interior field
  for (cplx z : {cplx(0.8, 0.1), cplx(-0.7, -0.2)})
    CHECK(dist(cauchy_eval(fp.trace(), z), fp.eval(z)) <= 1e-8);
}

TEST_CASE("period matrix: annulus value and blob symmetry") {
  Domain ann = annulus_domain(0.5, 256);
  DirichletSolver as(ann);
  Eigen::MatrixXd p1 = period_matrix(ann, {as.measure(0)});
  REQUIRE(p1.rows() == 1);
  CHECK(p1(0, 0) == doctest::Approx(TWO_PI / std::log(2.0)).epsilon(1e-6));

  Domain blob = blob_domain(3, 7, 256);
  DirichletSolver bs(blob);
  Eigen::MatrixXd p2 = period_matrix(blob, {bs.measure(0), bs.measure(1)});
  REQUIRE(p2.rows() == 2);
  CHECK(p2(0, 1) == doctest::Approx(p2(1, 0)).epsilon(1e-12));
  // positive definite: trace and determinant positive for the 2x2 case
  CHECK(p2(0, 0) > 0);
  CHECK(p2(0, 0) * p2(1, 1) - p2(0, 1) * p2(1, 0) > 0);
}

}  // TEST_SUITE
