#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qdzip/quadrature.hpp"
#include "qdzip/testdomains.hpp"
#include "test_util.hpp"

using namespace qdzip;
using qdzip_test::dist;
using qdzip_test::ellipse_curve;

TEST_SUITE("quadrature") {

TEST_CASE("fft round trip and trigonometric upsampling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> x(64);
  for (cplx& v : x) v = cplx(u(rng), u(rng));
  std::vector<cplx> back = fft_inverse(fft_forward(x));
  for (int i = 0; i < 64; ++i) CHECK(dist(back[i], x[i]) <= 1e-12);

  std::vector<cplx> wave(64);
  for (int i = 0; i < 64; ++i) wave[i] = std::exp(cplx(0, TWO_PI * i / 64));
  std::vector<cplx> fine = fft_upsample(wave, 4);
  REQUIRE(fine.size() == 256);
  for (int i = 0; i < 256; ++i)
    CHECK(dist(fine[i], std::exp(cplx(0, TWO_PI * i / 256))) <= 1e-12);
}

TEST_CASE("boundary spectrum of the coordinate on an ellipse") {
  Domain dom({ellipse_curve()}, 256);
  BoundaryFunction f = BoundaryFunction::from_callable(dom, [](cplx z) { return z; });
  std::vector<cplx> spec = f.spectrum(0);
  REQUIRE(spec.size() == 256);
  for (int j = 0; j < 256; ++j) {
    int m = fft_freq(j, 256);
    cplx want = m == 1 ? cplx(0.75, 0) : m == -1 ? cplx(0.25, 0) : cplx(0, 0);
    CHECK(dist(spec[j], want) <= 1e-13);
  }
}

TEST_CASE("spectral derivative of a boundary function") {
  Domain dom = disc_domain(256);
  BoundaryFunction f = BoundaryFunction::from_callable(dom, [](cplx z) { return z; });
  BoundaryFunction df = f.derivative_dt();
  for (int i = 0; i < 256; i += 19)
    CHECK(dist(df.sample(0, i), cplx(0, 1) * f.sample(0, i)) <= 1e-12);
}

TEST_CASE("trig interpolation agrees with the underlying curve") {
  Domain dom({ellipse_curve()}, 256);
  BoundaryFunction f = BoundaryFunction::from_callable(dom, [](cplx z) { return z; });
  CHECK(dist(f.eval(0, 0.7), dom.curve(0).point(0.7)) <= 1e-12);
  std::vector<cplx> up = f.upsampled(0, 2);
  REQUIRE(up.size() == 512);
  for (int i = 0; i < 512; i += 25)
    CHECK(dist(up[i], dom.curve(0).point(TWO_PI * i / 512)) <= 1e-12);
}

TEST_CASE("tail ratio separates resolved from unresolved data") {
  Domain dom = disc_domain(256);
  BoundaryFunction smooth =
      BoundaryFunction::from_callable(dom, [](cplx z) { return std::exp(z); });
  CHECK(smooth.tail_ratio() <= 1e-12);
  // A non-periodic frequency leaks into every mode; the top-decile energy
  // sits many orders above the spectrally resolved case.
  BoundaryFunction rough = BoundaryFunction::from_param(
      dom, [](int, double t, cplx) { return std::sin(37.1 * t); });
  CHECK(rough.tail_ratio() >= 1e-3);
  CHECK(rough.tail_ratio() >= 1e6 * smooth.tail_ratio());
}

TEST_CASE("closed contour integrals reach spectral accuracy") {
  Domain disc = disc_domain(256);
  BoundaryFunction one =
      BoundaryFunction::from_callable(disc, [](cplx) { return cplx(1, 0); });
  BoundaryFunction inv =
      BoundaryFunction::from_callable(disc, [](cplx z) { return 1.0 / z; });
  BoundaryFunction conj_f =
      BoundaryFunction::from_callable(disc, [](cplx z) { return std::conj(z); });
  CHECK(dist(integrate_closed(one, Weight::dz), cplx(0, 0)) <= 1e-12);
  CHECK(dist(integrate_closed(inv, Weight::dz), cplx(0, TWO_PI)) <= 1e-10);
  CHECK(dist(integrate_closed(one, Weight::ds), cplx(TWO_PI, 0)) <= 1e-10);
  CHECK(dist(integrate_closed(conj_f, Weight::dz) / cplx(0, 2), cplx(PI, 0)) <= 1e-10);

  Domain ann = annulus_domain(0.5, 256);
  BoundaryFunction conj_a =
      BoundaryFunction::from_callable(ann, [](cplx z) { return std::conj(z); });
  CHECK(dist(integrate_closed(conj_a, Weight::dz) / cplx(0, 2), cplx(0.75 * PI, 0)) <=
        1e-10);
  BoundaryFunction inv_a =
      BoundaryFunction::from_callable(ann, [](cplx z) { return 1.0 / z; });
  // inner curve is stored clockwise
  CHECK(dist(integrate_curve(inv_a, 0, Weight::dz), cplx(0, -TWO_PI)) <= 1e-10);
  CHECK(dist(integrate_curve(inv_a, 1, Weight::dz), cplx(0, TWO_PI)) <= 1e-10);
}

TEST_CASE("cauchy integral reproduces holomorphic data and kills conjugates") {
  Domain disc = disc_domain(256);
  BoundaryFunction sq =
      BoundaryFunction::from_callable(disc, [](cplx z) { return z * z; });
  CHECK(dist(cauchy_eval(sq, cplx(0.3, 0.1)), cplx(0.08, 0.06)) <= 1e-12);
  BoundaryFunction conj_f =
      BoundaryFunction::from_callable(disc, [](cplx z) { return std::conj(z); });
  CHECK(dist(cauchy_eval(conj_f, cplx(0.3, 0.1)), cplx(0, 0)) <= 1e-12);

  Domain ann = annulus_domain(0.5, 256);
  BoundaryFunction inv =
      BoundaryFunction::from_callable(ann, [](cplx z) { return 1.0 / z; });
  CHECK(dist(cauchy_eval(inv, cplx(0.7, 0)), cplx(1.0 / 0.7, 0)) <= 1e-10);
}

TEST_CASE("cauchy evaluation near the boundary upsamples, then gives up") {
  Domain disc = disc_domain(256);
  BoundaryFunction sq =
      BoundaryFunction::from_callable(disc, [](cplx z) { return z * z; });
  // 0.002 away from the rim: inside the documented adequacy range (one
  // thousandth of the diameter), reachable by the upsampling budget.
  cplx z(0.998, 0);
  CHECK(dist(cauchy_eval(sq, z), z * z) <= 1e-8);
  CHECK_THROWS_AS(cauchy_eval(sq, cplx(1.0 - 1e-12, 0)), AmbiguityError);
}

TEST_CASE("cauchy derivative evaluation") {
  Domain disc = disc_domain(256);
  BoundaryFunction sq =
      BoundaryFunction::from_callable(disc, [](cplx z) { return z * z; });
  CHECK(dist(cauchy_derivative_eval(sq, cplx(0.3, 0), 1), cplx(0.6, 0)) <= 1e-11);
  BoundaryFunction ex =
      BoundaryFunction::from_callable(disc, [](cplx z) { return std::exp(z); });
  CHECK(dist(cauchy_derivative_eval(ex, cplx(0, 0), 2), cplx(1, 0)) <= 1e-11);
}

TEST_CASE("argument principle counts zeros and poles") {
  auto f = [](cplx z) { return z * z - 0.25; };
  CHECK(argument_principle_count(f, cplx(0, 0), 0.7) == 2);
  CHECK(argument_principle_count(f, cplx(0, 0), 0.3) == 0);
  auto pole = [](cplx z) { return 1.0 / z; };
  CHECK(argument_principle_count(pole, cplx(0, 0), 0.5) == -1);
}

TEST_CASE("zero search finds roots and checks the count") {
  auto f = [](cplx z) { return z * z - 0.25; };
  std::vector<cplx> roots = locate_zeros(f, SearchRegion::rect(-1, 1, -1, 1), 2);
  REQUIRE(roots.size() == 2);
  std::sort(roots.begin(), roots.end(),
            [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(dist(roots[0], cplx(-0.5, 0)) <= 1e-10);
  CHECK(dist(roots[1], cplx(0.5, 0)) <= 1e-10);
  CHECK_THROWS_AS(locate_zeros(f, SearchRegion::rect(-1, 1, -1, 1), 3),
                  AmbiguityError);

  Domain ann = annulus_domain(0.5, 256);
  auto g = [](cplx z) { return z * z - 0.49; };
  std::vector<cplx> inside =
      locate_zeros(g, SearchRegion::domain_interior(ann, 0.02), 2);
  REQUIRE(inside.size() == 2);
  CHECK(std::abs(std::abs(inside[0]) - 0.7) <= 1e-9);
}

TEST_CASE("square winding tracks phase on box contours") {
  cplx c(0.2, 0.1);
  CHECK(square_winding([c](cplx z) { return z - c; }, c, 0.3) == 1);
  CHECK(square_winding([c](cplx z) { return (z - c) * (z - c); }, c, 0.3) == 2);
  CHECK(square_winding([c](cplx z) { return z - c; }, cplx(2, 2), 0.3) == 0);
}

TEST_CASE("holomorphic trace lift matches direct boundary values") {
  Curve c = qdzip_test::circle_curve(1.0);
  std::vector<cplx> lifted =
      lift_holomorphic_trace(c, 256, 1e-3, [](cplx z) { return std::exp(z); });
  REQUIRE(lifted.size() == 256);
  for (int i = 0; i < 256; i += 17) {
    cplx z = c.point(TWO_PI * i / 256);
    CHECK(dist(lifted[i], std::exp(z)) <= 1e-8);
  }
}

}  // TEST_SUITE
