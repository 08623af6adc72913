#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hsaw/geom.hpp"

using namespace hsaw::geom;

namespace {

HPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.0, 4.0), t(0.0, 2 * std::numbers::pi);
  const double rho = r(rng), th = t(rng);
  return {std::cosh(rho), std::sinh(rho) * std::cos(th), std::sinh(rho) * std::sin(th)};
}

Mirror random_mirror(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> s(-2.0, 2.0), t(0.0, 2 * std::numbers::pi);
  const double a = s(rng), th = t(rng);
  return {std::sinh(a), std::cosh(a) * std::cos(th), std::cosh(a) * std::sin(th)};
}

}  // namespace

TEST_CASE("minkowski form") {
  CHECK(mink(HPoint{}, HPoint{}) == doctest::Approx(-1.0));
  CHECK(mink(Mirror{0, 1, 0}, Mirror{0, 1, 0}) == doctest::Approx(1.0));
  const HPoint p{std::cosh(1.0), std::sinh(1.0), 0};
  CHECK(mink(p, HPoint{}) == doctest::Approx(-std::cosh(1.0)));
}

TEST_CASE("distance") {
  CHECK(hyp_dist(HPoint{}, HPoint{}) == 0.0);
  CHECK(hyp_dist(HPoint{}, {std::cosh(1.0), std::sinh(1.0), 0}) == doctest::Approx(1.0).epsilon(1e-12));
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const HPoint p = random_point(rng), q = random_point(rng);
    CHECK(std::abs(hyp_dist(p, q) - hyp_dist(q, p)) < 1e-12);
  }
}

TEST_CASE("reflection") {
  const HPoint p{std::cosh(1.0), std::sinh(1.0), 0};
  const HPoint r = reflect(Mirror{0, 1, 0}, p);
  CHECK(r.x0 == doctest::Approx(std::cosh(1.0)));
  CHECK(r.x1 == doctest::Approx(-std::sinh(1.0)));
  CHECK(std::abs(r.x2) < 1e-15);

  std::mt19937_64 rng(11);
  for (int k = 0; k < 500; ++k) {
    const Mirror m = random_mirror(rng);
    const HPoint a = random_point(rng), b = random_point(rng);
    const HPoint aa = reflect(m, reflect(m, a));
    CHECK(std::abs(aa.x0 - a.x0) < 1e-12 * a.x0 * 10);
    CHECK(std::abs(aa.x1 - a.x1) < 1e-12 * a.x0 * 10);
    CHECK(std::abs(hyp_dist(reflect(m, a), reflect(m, b)) - hyp_dist(a, b)) < 1e-9);
    const HPoint ra = reflect(m, a);
    CHECK(std::abs(mink(ra, ra) + 1.0) < kInvariantTol * ra.x0 * ra.x0);
    CHECK(ra.x0 >= 1.0);
  }
}

TEST_CASE("triangle mirrors") {
  const TriangleMirrors t = triangle_mirrors();
  for (const Mirror& m : {t.edge, t.bisector, t.perpendicular}) CHECK(mink(m, m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mink(t.edge, t.perpendicular)) < 1e-12);
  // oracle values evaluated independently: cos(pi/7) = 0.9009688679..., cos(pi/3) = 0.5
  CHECK(std::abs(mink(t.edge, t.bisector) + 0.9009688679024191) < 1e-9);
  CHECK(std::abs(mink(t.bisector, t.perpendicular) + 0.5) < 1e-9);
  // both mirrors of the pi/7 corner pass through the basepoint
  CHECK(std::abs(mink(t.edge, HPoint{})) < 1e-12);
  CHECK(std::abs(mink(t.bisector, HPoint{})) < 1e-12);
}

TEST_CASE("edge length") {
  // 2 arccosh(0.5 / sin(pi/7)) evaluated by hand: 1.09054966...
  CHECK(std::abs(edge_length() - 1.0905) < 1e-3);
  CHECK(std::abs(std::cosh(edge_length() / 2) * std::sin(std::numbers::pi / 7) - 0.5) < 1e-12);
}

TEST_CASE("disk chart") {
  const DiskPoint o = to_disk(HPoint{});
  CHECK(o.u == 0.0);
  CHECK(o.v == 0.0);
  const DiskPoint d = to_disk({std::cosh(1.0), std::sinh(1.0), 0});
  CHECK(std::abs(d.u - 0.46211715726000974) < 1e-12);  // tanh(1/2)
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const HPoint p = random_point(rng);
    const DiskPoint q = to_disk(p);
    CHECK(q.u * q.u + q.v * q.v < 1.0);
    const HPoint back = from_disk(q);
    CHECK(std::abs(back.x0 - p.x0) < 1e-9 * p.x0);
    CHECK(std::abs(back.x1 - p.x1) < 1e-9 * p.x0);
    CHECK(std::abs(back.x2 - p.x2) < 1e-9 * p.x0);
  }
}

TEST_CASE("renormalize") {
  const IsomMatrix id = renormalize(IsomMatrix::identity());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(id(r, c) == doctest::Approx(r == c ? 1.0 : 0.0));

  const TriangleMirrors t = triangle_mirrors();
  const IsomMatrix refl = IsomMatrix::reflection(t.perpendicular);
  const IsomMatrix rr = renormalize(refl);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(rr(r, c) - refl(r, c)) < 1e-12);
  const IsomMatrix twice = renormalize(rr);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(twice(r, c) - rr(r, c)) < 1e-12);

  const std::array<IsomMatrix, 3> gen{IsomMatrix::reflection(t.edge), IsomMatrix::reflection(t.bisector), refl};
  std::mt19937_64 rng(5);
  IsomMatrix m;
  for (int k = 0; k < 40; ++k) m = m * gen[rng() % 3];
  const IsomMatrix fixed = renormalize(m);
  CHECK(fixed.form_error() < 1e-10);

  // 60 products with renormalization every 10
  IsomMatrix acc;
  for (int k = 1; k <= 60; ++k) {
    acc = acc * gen[rng() % 3];
    if (k % 10 == 0) acc = renormalize(acc);
  }
  CHECK(acc.form_error() < 1e-8);

  std::array<double, 9> bad{1, 0, 0, 0, 1.1, 0, 0, 0, 1};
  CHECK_THROWS_AS(renormalize(IsomMatrix(bad)), DriftError);
}
