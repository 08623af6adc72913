#include "hsaw/graph.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>

#include <omp.h>

namespace hsaw {

std::string to_string(HullMode m) { return m == HullMode::one_step ? "one-step" : "fixpoint"; }
std::string to_string(BoundaryMode m) { return m == BoundaryMode::tangent ? "tangent" : "exposed"; }

HullMode parse_hull_mode(const std::string& s) {
  if (s == "one-step") return HullMode::one_step;
  if (s == "fixpoint") return HullMode::fixpoint;
  throw Error("unknown hull mode '" + s + "' (one-step|fixpoint)");
}

BoundaryMode parse_boundary_mode(const std::string& s) {
  if (s == "tangent") return BoundaryMode::tangent;
  if (s == "exposed") return BoundaryMode::exposed;
  throw Error("unknown boundary mode '" + s + "' (tangent|exposed)");
}

namespace {

// Vertices of depth <= r form an id prefix in both build modes (layered ids,
// or BFS discovery order).
std::size_t prefix_size(const Lattice& l, int r) {
  std::size_t m = 0;
  while (m < l.size() && l.depth(m) <= r) ++m;
  for (std::size_t v = m; v < l.size(); ++v)
    if (l.depth(v) <= r) throw Error("lattice ids are not ordered by depth");
  return m;
}

struct Region {
  std::size_t m = 0;             // region = ids [0, m)
  std::vector<std::uint8_t> d;   // m x m distances

  int dist(std::size_t a, std::size_t b) const { return d[a * m + b]; }
};

Region distance_matrix(const Lattice& l, int r) {
  Region reg;
  reg.m = prefix_size(l, r);
  reg.d.resize(reg.m * reg.m);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t a = 0; a < reg.m; ++a) {
    const std::vector<int> row = l.bfs(a);
    for (std::size_t b = 0; b < reg.m; ++b) reg.d[a * reg.m + b] = static_cast<std::uint8_t>(row[b]);
  }
  return reg;
}

void check_audit_radius(const Lattice& l, int r_audit) {
  if (r_audit < 0 || r_audit > l.interior_radius())
    throw Error("audit radius " + std::to_string(r_audit) + " exceeds the interior radius " +
                std::to_string(l.interior_radius()));
}

using Triple = std::array<VertexId, 3>;

// Larger value wins; ties go to the lexicographically smaller triple.
bool worse(int value, const Triple& t, int best, const Triple& bt) {
  return value > best || (value == best && t < bt);
}

}  // namespace

ThinnessReport thinness_audit(const Lattice& l, int r_audit, int delta) {
  check_audit_radius(l, r_audit);
  const Region reg = distance_matrix(l, std::min(r_audit + kExcursionMargin, l.radius()));
  const std::size_t m = reg.m;
  const std::size_t na = prefix_size(l, r_audit);
  const std::size_t words = (m + 63) / 64;

  // ball bitsets of radius 0..cap around each region vertex
  const int cap = delta + 1;
  std::vector<std::uint64_t> ball(m * static_cast<std::size_t>(cap + 1) * words, 0);
  const auto ball_at = [&](std::size_t w, int r) { return &ball[(w * static_cast<std::size_t>(cap + 1) + static_cast<std::size_t>(r)) * words]; };
  for (std::size_t w = 0; w < m; ++w)
    for (std::size_t b = 0; b < m; ++b)
      for (int r = reg.dist(w, b); r <= cap; ++r) ball_at(w, r)[b / 64] |= 1ULL << (b % 64);

  // interval bitsets and member lists for all audit pairs
  std::vector<std::uint64_t> ibits(na * na * words, 0);
  std::vector<std::vector<std::uint32_t>> ilist(na * na);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t u = 0; u < na; ++u)
    for (std::size_t v = 0; v < na; ++v) {
      const int duv = reg.dist(u, v);
      std::uint64_t* bits = &ibits[(u * na + v) * words];
      for (std::size_t w = 0; w < m; ++w)
        if (reg.dist(u, w) + reg.dist(w, v) == duv) {
          bits[w / 64] |= 1ULL << (w % 64);
          ilist[u * na + v].push_back(static_cast<std::uint32_t>(w));
        }
    }

  ThinnessReport rep;
  rep.r_audit = r_audit;
  rep.delta = delta;
  rep.max_thinness = -1;
  rep.triples = static_cast<std::uint64_t>(na) * na * na;

#pragma omp parallel
  {
    int best = -1;
    Triple bt{};
    std::vector<std::uint64_t> side(words);
#pragma omp for schedule(dynamic, 1) nowait
    for (std::size_t u = 0; u < na; ++u)
      for (std::size_t v = u; v < na; ++v)
        for (std::size_t x = 0; x < na; ++x) {
          const std::uint64_t* a = &ibits[(u * na + x) * words];
          const std::uint64_t* b = &ibits[(x * na + v) * words];
          for (std::size_t q = 0; q < words; ++q) side[q] = a[q] | b[q];
          int value = 0;
          for (std::uint32_t w : ilist[u * na + v]) {
            int r = 0;
            for (; r <= cap; ++r) {
              const std::uint64_t* bw = ball_at(w, r);
              bool hit = false;
              for (std::size_t q = 0; q < words && !hit; ++q) hit = (bw[q] & side[q]) != 0;
              if (hit) break;
            }
            if (r > cap) {
              r = std::numeric_limits<int>::max();
              for (std::size_t s = 0; s < m; ++s)
                if (side[s / 64] >> (s % 64) & 1ULL) r = std::min(r, reg.dist(w, s));
            }
            value = std::max(value, r);
          }
          const Triple t{u, v, x};
          if (worse(value, t, best, bt)) {
            best = value;
            bt = t;
          }
        }
#pragma omp critical
    if (worse(best, bt, rep.max_thinness, rep.worst)) {
      rep.max_thinness = best;
      rep.worst = bt;
    }
  }
  rep.pass = rep.max_thinness <= delta;
  return rep;
}

ThinnessReport thinness_audit_serial(const Lattice& l, int r_audit, int delta) {
  check_audit_radius(l, r_audit);
  const std::size_t m = prefix_size(l, std::min(r_audit + kExcursionMargin, l.radius()));
  std::vector<std::vector<int>> d(m);
  for (std::size_t a = 0; a < m; ++a) {
    d[a] = l.bfs(a);
    d[a].resize(m);
  }
  const std::size_t na = prefix_size(l, r_audit);
  const auto seg = [&](std::size_t u, std::size_t v) {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < m; ++w)
      if (d[u][w] + d[w][v] == d[u][v]) out.push_back(w);
    return out;
  };
  std::vector<std::vector<std::vector<std::size_t>>> iv(na, std::vector<std::vector<std::size_t>>(na));
  for (std::size_t u = 0; u < na; ++u)
    for (std::size_t v = 0; v < na; ++v) iv[u][v] = seg(u, v);

  ThinnessReport rep;
  rep.r_audit = r_audit;
  rep.delta = delta;
  rep.max_thinness = -1;
  rep.triples = static_cast<std::uint64_t>(na) * na * na;
  for (std::size_t u = 0; u < na; ++u)
    for (std::size_t v = u; v < na; ++v)
      for (std::size_t x = 0; x < na; ++x) {
        int value = 0;
        for (std::size_t w : iv[u][v]) {
          int r = std::numeric_limits<int>::max();
          for (std::size_t s : iv[u][x]) r = std::min(r, d[w][s]);
          for (std::size_t s : iv[x][v]) r = std::min(r, d[w][s]);
          value = std::max(value, r);
        }
        const Triple t{u, v, x};
        if (worse(value, t, rep.max_thinness, rep.worst)) {
          rep.max_thinness = value;
          rep.worst = t;
        }
      }
  rep.pass = rep.max_thinness <= delta;
  return rep;
}

int geodesic_excursion(const Lattice& l, int r) {
  const int outer = std::min(r + kExcursionMargin, l.radius());
  const Region reg = distance_matrix(l, outer);
  const std::size_t na = prefix_size(l, r);
  int worst = 0;
#pragma omp parallel for reduction(max : worst) schedule(dynamic, 4)
  for (std::size_t u = 0; u < na; ++u)
    for (std::size_t v = u + 1; v < na; ++v) {
      const int top = std::max(l.depth(u), l.depth(v));
      const int duv = reg.dist(u, v);
      for (std::size_t w = 0; w < reg.m; ++w)
        if (reg.dist(u, w) + reg.dist(w, v) == duv) worst = std::max(worst, l.depth(w) - top);
    }
  return worst;
}

DistortionReport metric_distortion(const Lattice& l) {
  const std::vector<geom::HPoint>& xs = l.coordinates();
  const double ell = geom::edge_length();
  const std::size_t n = l.size();

  struct Partial {
    double sh = 0, sg = 0, shh = 0, shg = 0;
    double max_ratio = 0, min_ratio = std::numeric_limits<double>::infinity();
    double adj = 0;
    std::uint64_t pairs = 0;
  };
  std::vector<Partial> part(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t a = 0; a < n; ++a) {
    const std::vector<int> row = l.bfs(a);
    Partial p;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double h = geom::hyp_dist(xs[a], xs[b]) / ell;
      const double g = row[b];
      p.sh += h;
      p.sg += g;
      p.shh += h * h;
      p.shg += h * g;
      p.max_ratio = std::max(p.max_ratio, g / h);
      p.min_ratio = std::min(p.min_ratio, g / h);
      if (row[b] == 1) p.adj = std::max(p.adj, std::abs(h - 1.0) * ell);
      ++p.pairs;
    }
    part[a] = p;
  }
  Partial t;
  for (const Partial& p : part) {
    t.sh += p.sh;
    t.sg += p.sg;
    t.shh += p.shh;
    t.shg += p.shg;
    t.max_ratio = std::max(t.max_ratio, p.max_ratio);
    t.min_ratio = std::min(t.min_ratio, p.min_ratio);
    t.adj = std::max(t.adj, p.adj);
    t.pairs += p.pairs;
  }
  DistortionReport r;
  r.radius = l.radius();
  r.pairs = t.pairs;
  const double np = static_cast<double>(t.pairs);
  const double mh = t.sh / np, mg = t.sg / np;
  r.slope = (t.shg / np - mh * mg) / (t.shh / np - mh * mh);
  r.intercept = mg - r.slope * mh;
  r.max_ratio = t.max_ratio;
  r.min_ratio = t.min_ratio;
  r.adjacent_error = t.adj;

  double k = -std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(max : k) schedule(dynamic, 8)
  for (std::size_t a = 0; a < n; ++a) {
    const std::vector<int> row = l.bfs(a);
    for (std::size_t b = a + 1; b < n; ++b) k = std::max(k, row[b] - r.slope * geom::hyp_dist(xs[a], xs[b]) / ell);
  }
  r.additive_k = k;
  return r;
}

}  // namespace hsaw
