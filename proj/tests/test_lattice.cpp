#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hsaw/lattice.hpp"
#include "hsaw/tiling.hpp"

using namespace hsaw;

namespace {

bool adjacent(const Lattice& l, VertexId a, VertexId b) { return l.slot_of(a, b) >= 0; }

void check_structure(const Lattice& l) {
  for (VertexId v = 0; v < l.size(); ++v) {
    for (int s = 0; s < kDegree; ++s) {
      const VertexId w = l.neighbor(v, s);
      if (w == kNoVertex) continue;
      REQUIRE(w != v);
      REQUIRE(adjacent(l, w, v));
      REQUIRE(std::count(l.rotation(v).begin(), l.rotation(v).end(), w) == 1);
    }
    if (l.depth(v) < l.radius()) {
      REQUIRE(l.degree(v) == 7);
      for (int s = 0; s < kDegree; ++s) REQUIRE(adjacent(l, l.neighbor(v, s), l.neighbor(v, s + 1)));
    }
  }
}

}  // namespace

TEST_CASE("small balls") {
  for (BuildMode mode : {BuildMode::combinatorial, BuildMode::geometric}) {
    const Lattice b1 = build_ball(1, mode);
    CHECK(b1.size() == 8);
    CHECK(b1.degree(kRoot) == 7);
    for (int s = 0; s < 7; ++s) CHECK(adjacent(b1, b1.neighbor(kRoot, s), b1.neighbor(kRoot, s + 1)));
    const Lattice b2 = build_ball(2, mode);
    CHECK(b2.size() == 29);
    CHECK(layer_sizes(b2) == std::vector<std::size_t>{1, 7, 21});
    CHECK(b2.interior_radius() == 1);
  }
}

TEST_CASE("radius cap") {
  CHECK_THROWS_AS(build_ball(0, BuildMode::combinatorial), Error);
  CHECK_THROWS_AS(build_ball(26, BuildMode::combinatorial), Error);
}

TEST_CASE("layer recurrence and dual construction") {
  for (int r = 1; r <= 10; ++r) {
    const Lattice c = build_ball(r, BuildMode::combinatorial);
    const Lattice g = build_ball(r, BuildMode::geometric);
    const auto a = layer_sizes(c);
    CHECK(layer_sizes(g) == a);
    for (int k = 2; k + 1 <= r; ++k) CHECK(a[k + 1] == 3 * a[k] - a[k - 1]);
    CHECK(canonical_digest(c) == canonical_digest(g));
    check_structure(c);
    check_structure(g);
  }
}

TEST_CASE("digest separates different rotation systems") {
  const Lattice a = build_ball(3, BuildMode::combinatorial);
  std::vector<Rotation> rot;
  std::vector<int> depth;
  for (VertexId v = 0; v < a.size(); ++v) {
    rot.push_back(a.rotation(v));
    depth.push_back(a.depth(v));
  }
  std::swap(rot[1][2], rot[1][3]);  // break the cyclic order at one vertex
  const Lattice b(3, BuildMode::combinatorial, rot, depth);
  CHECK(canonical_digest(a) != canonical_digest(b));
  CHECK_THROWS_AS(rooted_isomorphism(b, a), Error);
}

TEST_CASE("geometric coordinates") {
  const Lattice g = build_ball(6, BuildMode::geometric);
  const double ell = geom::edge_length();
  for (VertexId v = 0; v < g.size(); ++v) {
    const geom::HPoint& p = g.coord(v);
    CHECK(std::abs(geom::mink(p, p) + 1.0) < 1e-9 * p.x0 * p.x0);
    const geom::DiskPoint d = geom::to_disk(p);
    CHECK(d.u * d.u + d.v * d.v < 1.0);
    for (VertexId w : g.rotation(v))
      if (w != kNoVertex) CHECK(std::abs(geom::hyp_dist(p, g.coord(w)) - ell) < 1e-9);
  }
  const Lattice c = build_ball_with_coordinates(6);
  CHECK(c.mode() == BuildMode::combinatorial);
  for (VertexId v = 0; v < c.size(); ++v)
    for (VertexId w : c.rotation(v))
      if (w != kNoVertex) CHECK(std::abs(geom::hyp_dist(c.coord(v), c.coord(w)) - ell) < 1e-9);
}

TEST_CASE("graph distance") {
  const Lattice b2 = build_ball(2, BuildMode::combinatorial);
  CHECK(b2.distance(kRoot, kRoot) == 0);
  for (VertexId v = 0; v < b2.size(); ++v) CHECK(b2.distance(kRoot, v) == b2.depth(v));
  // layer-1 vertices three slots apart are joined only through the root
  CHECK(b2.distance(b2.neighbor(kRoot, 0), b2.neighbor(kRoot, 3)) == 2);
  CHECK(b2.distance(b2.neighbor(kRoot, 0), b2.neighbor(kRoot, 1)) == 1);
}

TEST_CASE("json round trip") {
  const Lattice c = build_ball_with_coordinates(3);
  const nlohmann::json doc = to_json(c);
  CHECK(doc["vertex_count"] == 29 + 56);
  const Lattice back = lattice_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.size() == c.size());
  CHECK(canonical_digest(back) == canonical_digest(c));
  for (VertexId v = 0; v < c.size(); ++v) {
    CHECK(back.rotation(v) == c.rotation(v));
    CHECK(back.depth(v) == c.depth(v));
    CHECK(std::abs(back.coord(v).x1 - c.coord(v).x1) < 1e-10);
  }
  nlohmann::json broken = doc;
  broken["rotation"][1][0] = nullptr;
  CHECK_THROWS_AS(lattice_from_json(broken), Error);
}

TEST_CASE("tiling agrees with the explicit ball") {
  const Tiling t(6);
  const Lattice c = build_ball(10, BuildMode::combinatorial);
  for (int k = 0; k <= 10; ++k) CHECK(t.layer_size(k) == layer_sizes(c)[static_cast<std::size_t>(k)]);
  for (VertexId v = 0; v < c.size(); ++v) {
    if (c.depth(v) >= 10) continue;
    REQUIRE(t.rotation(v) == c.rotation(v));
    REQUIRE(t.rotation_arithmetic(v) == c.rotation(v));
    REQUIRE(t.depth(v) == c.depth(v));
  }
}

TEST_CASE("tiling distance matches BFS") {
  const Tiling t;
  const Lattice c = build_ball(10, BuildMode::combinatorial);
  const VertexId inner = t.layer_offset(6);  // all of B_5
  for (VertexId u = 0; u < inner; ++u) {
    const std::vector<int> d = c.bfs(u);
    for (VertexId v = 0; v < inner; ++v) REQUIRE(t.distance(u, v) == d[v]);
  }
}

TEST_CASE("tiling distance matches BFS deeper") {
  const Tiling t;
  const Lattice c = build_ball(13, BuildMode::combinatorial);
  std::mt19937_64 rng(42);
  const VertexId inner = t.layer_offset(9);  // B_8
  for (int s = 0; s < 60; ++s) {
    const VertexId u = rng() % inner;
    const std::vector<int> d = c.bfs(u);
    for (int q = 0; q < 2000; ++q) {
      const VertexId v = rng() % inner;
      // inside B_13 a path between B_8 vertices is exact when it is no longer than 10
      if (d[v] <= 10) {
        REQUIRE(t.distance(u, v) == d[v]);
      } else {
        REQUIRE(t.distance(u, v) <= d[v]);
      }
    }
  }
}

TEST_CASE("tiling addressing limits") {
  const Tiling t;
  CHECK(t.max_depth() >= 40);
  const VertexId deep = t.layer_offset(t.max_depth());
  CHECK(t.depth(deep) == t.max_depth());
  CHECK(t.rotation(deep)[0] == t.parents(deep).low);
  CHECK_THROWS_AS(t.rotation(t.layer_offset(t.max_depth() + 1)), BallEscape);
  CHECK(t.distance(kRoot, deep) == t.max_depth());
}
