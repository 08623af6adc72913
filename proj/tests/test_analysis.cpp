#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <regex>

#include "hsaw/analysis.hpp"
#include "hsaw/tiling.hpp"

using namespace hsaw;

namespace {

const Tiling& tiling() {
  static const Tiling t;
  return t;
}

const ReflectionTable& table6() {
  static const ReflectionTable t = reflection_table(tiling(), 6);
  return t;
}

const Lattice& ball6() {
  static const Lattice l = build_ball_with_coordinates(6);
  return l;
}

std::vector<Walk> all_walks(int n) {
  std::vector<Walk> out;
  enumerate(tiling(), n, [&](const Walk& w) { out.push_back(w); });
  return out;
}

// Regression constants, derived once by exhaustion over Lambda_6 (40978 walks).
constexpr int kCStar = 2;
const Rational kP3Iti(2812, 2927), kP3Reflected(2925, 2927), kP3Boundary(1106, 2927);
const Rational kItiFraction6(14326, 14635);
constexpr int kRho6 = 2;

}  // namespace

TEST_CASE("iti events") {
  for (const Walk& w : all_walks(2)) CHECK(iti_event(tiling(), w, 1, 1));
  const Walk s = straight_walk(tiling(), 10);
  for (int i = 1; i < 10; ++i) CHECK(iti_event(tiling(), s, i, 0));
  CHECK_THROWS_AS(iti_event(tiling(), s, 0, 1), Error);
  CHECK_THROWS_AS(iti_event(tiling(), s, 10, 1), Error);
}

TEST_CASE("iti counts match the events and grow with C") {
  for (const Walk& w : all_walks(5)) {
    int prev = -1;
    for (int C = 0; C <= 4; ++C) {
      int k = 0;
      for (int i = 1; i < 5; ++i) k += iti_event(tiling(), w, i, C);
      CHECK(iti_count(tiling(), w, C) == k);
      CHECK(k >= prev);
      prev = k;
    }
  }
  // n = 2: mean count equals the event fraction
  const ExactMoments m = exact_moments(tiling(), 2, 0);
  std::uint64_t hits = 0;
  for (const Walk& w : all_walks(2)) hits += iti_event(tiling(), w, 1, 0);
  CHECK(m.mean_iti() == Rational(hits, 42));
}

TEST_CASE("exact mean displacement") {
  CHECK(exact_moments(tiling(), 1, 2).mean_disp() == 1);
  // independent sum over the 42 two-step walks on an explicit ball
  const Lattice b = build_ball(3, BuildMode::combinatorial);
  const std::vector<int> d = b.bfs(kRoot);
  std::uint64_t sum = 0, walks = 0;
  for (VertexId x : b.rotation(kRoot))
    for (VertexId y : b.rotation(x))
      if (y != kRoot) {
        sum += static_cast<std::uint64_t>(d[y]);
        ++walks;
      }
  CHECK(walks == 42);
  CHECK(exact_moments(tiling(), 2, 2).mean_disp() == Rational(sum, 42));
  CHECK(exact_moments(tiling(), 2, 2).mean_disp() == Rational(5, 3));
  // serial fold agrees
  const ExactMoments par = exact_moments(tiling(), 6, 2);
  std::uint64_t sd = 0;
  enumerate(tiling(), 6, [&](const Walk& w) { sd += static_cast<std::uint64_t>(displacement(tiling(), w)); });
  CHECK(par.sum_disp == sd);
}

TEST_CASE("calibration and the chain on Lambda_6") {
  const Calibration c = calibrate(table6());
  REQUIRE(c.c_star.has_value());
  CHECK(*c.c_star == kCStar);
  for (int i = 1; i < 6; ++i)
    for (int C = kCStar; C <= 8; ++C)
      for (BoundaryMode m : {BoundaryMode::tangent, BoundaryMode::exposed}) {
        const ChainResult r = inequality_chain(table6(), i, C, m);
        CHECK(r.first_holds);
        CHECK(r.second_holds);
        for (const Rational* q : {&r.p_iti, &r.p_reflected, &r.p_boundary}) {
          CHECK(*q >= 0);
          CHECK(*q <= 1);
          CHECK(40978 % boost::multiprecision::denominator(*q) == 0);
        }
      }
  const ChainResult r = inequality_chain(table6(), 3, kCStar);
  CHECK(r.p_iti == kP3Iti);
  CHECK(r.p_reflected == kP3Reflected);
  CHECK(r.p_boundary == kP3Boundary);
  CHECK(to_string(r.p_boundary) == "1106/2927");
  CHECK(chain_defects(table6(), kCStar).defect_pairs == 0);
  CHECK(chain_defects(table6(), 1).defect_pairs > 0);
}

TEST_CASE("iti fraction on Lambda_6") {
  CHECK(iti_fraction(table6(), kCStar) == kItiFraction6);
  Rational prev = 0;
  for (int C = 0; C <= 5; ++C) {
    const Rational f = iti_fraction(table6(), C);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(prev == 1);
}

TEST_CASE("hull boundary fractions") {
  const FractionSummary t = boundary_fraction(table6(), BoundaryMode::tangent);
  const FractionSummary e = boundary_fraction(table6(), BoundaryMode::exposed);
  CHECK(t.min > 0);
  CHECK(e.min >= t.min);
  std::uint64_t walks = 0;
  for (const auto& [q, k] : t.distribution) walks += k;
  CHECK(walks == table6().size());
  for (const Walk& w : all_walks(1)) {
    const HullSample h = hull_fractions(tiling(), w, HullMode::one_step, 1);
    CHECK(h.tangent == 1.0);
    CHECK(h.exposed == 1.0);
  }
  PivotChain<Tiling> chain(tiling(), 20, 4, MoveSet::dihedral);
  for (int s = 0; s < 30; ++s) {
    chain.run(100);
    const HullSample h = hull_fractions(tiling(), chain.walk(), HullMode::one_step, 1);
    CHECK(h.shell >= h.exposed);
    CHECK(h.tangent > 0.0);
  }
}

TEST_CASE("near-geodesic deviation") {
  const NearGeodesicReport r = near_geodesic_audit(tiling(), 6, kCStar);
  CHECK(r.rho == kRho6);
  REQUIRE(r.witness_index > 0);
  CHECK(iti_event(tiling(), r.witness, r.witness_index, kCStar));
  int prev = -1;
  for (int C = 0; C <= 4; ++C) {
    const int rho = near_geodesic_audit(tiling(), 5, C).rho;
    CHECK(rho >= prev);
    prev = rho;
  }
  CHECK(near_geodesic_audit(tiling(), 5, 0).rho == 0);
  // sampled and exhaustive variants agree on the same set
  CHECK(near_geodesic_audit(tiling(), all_walks(5), 2).rho == near_geodesic_audit(tiling(), 5, 2).rho);
}

TEST_CASE("batch means and line fits") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> x(100000);
  for (double& v : x) v = 3.0 + z(rng);
  const Estimate e = estimate(x);
  CHECK(std::abs(e.mean - 3.0) < 0.02);
  CHECK(e.se == doctest::Approx(1.0 / std::sqrt(1e5)).epsilon(0.3));
  // a slowly mixing series has a larger batch-means error than its iid error
  std::vector<double> ar(100000);
  double s = 0;
  for (double& v : ar) v = s = 0.99 * s + z(rng);
  CHECK(estimate(ar).se > 5.0 / std::sqrt(1e5));

  const LinearFit f = fit_line({1, 2, 3, 4}, {1.5, 2.0, 2.5, 3.0}, {0.1, 0.1, 0.1, 0.1});
  CHECK(f.slope == doctest::Approx(0.5));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0));
  CHECK(f.slope_se_sampling == doctest::Approx(0.1 / std::sqrt(5.0)));
  CHECK_THROWS_AS(fit_line({1}, {1}, {}), Error);
}

TEST_CASE("distribution statistics") {
  const std::vector<WalkCode> support{1, 2, 3, 4};
  CHECK(tv_to_uniform({1, 2, 3, 4, 4, 3, 2, 1}, support) == doctest::Approx(0.0));
  CHECK(tv_to_uniform({1, 1, 1, 1}, support) == doctest::Approx(0.75));
  CHECK(tv_to_uniform({9, 9}, support) == doctest::Approx(1.0));
  const auto [stat, dof] = chi_square_uniform({10, 10, 10, 10});
  CHECK(stat == 0.0);
  CHECK(dof == 3.0);
  // null expectation against simulation of exact uniform draws
  std::mt19937_64 rng(5);
  const std::uint64_t m = 500, n = 20000;
  std::vector<WalkCode> sup(m), draws(n);
  std::iota(sup.begin(), sup.end(), 0);
  double mean = 0;
  for (int rep = 0; rep < 20; ++rep) {
    for (auto& d : draws) d = rng() % m;
    mean += tv_to_uniform(draws, sup) / 20;
  }
  CHECK(mean == doctest::Approx(tv_null_expectation(m, n)).epsilon(0.05));
}

TEST_CASE("svg rendering") {
  const Walk w = straight_walk(tiling(), 5);
  const std::string svg = render_walk(ball6(), w);
  std::smatch m;
  const std::regex walk_re("class=\"walk\"");
  const auto count = [](const std::string& s, const std::regex& re) {
    return std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator());
  };
  CHECK(count(svg, walk_re) == 5);
  CHECK(render_walk(ball6(), w) == svg);

  // every plotted point inside the drawn unit circle
  const double half = 400.0, radius = 392.0;
  const std::regex pt("([0-9.]+),([0-9.]+)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), pt); it != std::sregex_iterator(); ++it) {
    const double x = std::stod((*it)[1]) - half, y = std::stod((*it)[2]) - half;
    CHECK(std::hypot(x, y) <= radius + 1e-3);
  }

  // a walk with a tangent vertex, drawn with its reflection
  const ReflectionTable& t = table6();
  std::size_t idx = 0;
  int i = 0;
  for (; idx < t.size(); ++idx) {
    for (i = 1; i < 6; ++i)
      if (t.slot[idx * t.stride() + static_cast<std::size_t>(i)] >= 0 &&
          t.image[idx * 5 + static_cast<std::size_t>(i) - 1] != t.code[idx])
        break;
    if (i < 6) break;
  }
  REQUIRE(idx < t.size());
  const Walk g = decode_walk(tiling(), t.code[idx], 6);
  const Walk r = reflect_at(tiling(), g, i);
  const int k = t.slot[idx * t.stride() + static_cast<std::size_t>(i)];
  const std::string fig = render_walk(ball6(), g, i, Automorphism::reflection(g[static_cast<std::size_t>(i)], k));
  CHECK(count(fig, std::regex("class=\"mirror\"")) == 1);
  CHECK(count(fig, std::regex("class=\"reflected\"")) == 6 - i);
  // prefix polylines coincide
  const std::string a = render_walk(ball6(), g), b = render_walk(ball6(), r);
  const std::regex walk_path("<path class=\"walk\" d=\"([^\"]*)\"");
  std::vector<std::string> pa, pb;
  for (auto it = std::sregex_iterator(a.begin(), a.end(), walk_path); it != std::sregex_iterator(); ++it) pa.push_back((*it)[1]);
  for (auto it = std::sregex_iterator(b.begin(), b.end(), walk_path); it != std::sregex_iterator(); ++it) pb.push_back((*it)[1]);
  REQUIRE(pa.size() == 6);
  REQUIRE(pb.size() == 6);
  for (int e = 0; e < i; ++e) CHECK(pa[static_cast<std::size_t>(e)] == pb[static_cast<std::size_t>(e)]);
  CHECK(pa != pb);

  CHECK_THROWS_AS(render_walk(build_ball(6, BuildMode::combinatorial), w), Error);
  CHECK_THROWS_AS(render_walk(ball6(), w, 2, Automorphism::reflection(kRoot, 0)), Error);
}
