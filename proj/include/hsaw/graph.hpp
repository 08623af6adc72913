#pragma once

// Metric and symmetry algorithms shared by explicit balls (Lattice) and the
// implicit tiling. Both expose the same rotation-system interface; distances
// come from BFS on a ball and from the layer oracle on the tiling.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsaw/lattice.hpp"
#include "hsaw/tiling.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

template <class G>
concept RotationGraph = requires(const G& g, VertexId v, int s) {
  { g.neighbor(v, s) } -> std::convertible_to<VertexId>;
  { g.rotation(v) } -> std::convertible_to<Rotation>;
  { g.slot_of(v, v) } -> std::convertible_to<int>;
  { g.depth(v) } -> std::convertible_to<int>;
  { g.distance(v, v) } -> std::convertible_to<int>;
  { g.contains(v) } -> std::convertible_to<bool>;
  { g.interior_radius() } -> std::convertible_to<int>;
};

/// Sorted, duplicate-free vertex list.
using VertexSet = std::vector<VertexId>;

inline void normalize(VertexSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}
inline bool member(const VertexSet& s, VertexId v) { return std::binary_search(s.begin(), s.end(), v); }

// A geodesic between two vertices of depth <= D stays within depth D + 1
// (measured exhaustively in the tests); pruning keeps one more layer.
inline constexpr int kExcursionMargin = 2;

// ---------------------------------------------------------------------------
// distance to a fixed vertex

struct BfsDistance {
  std::vector<int> dist;
  int operator()(VertexId w) const { return dist[w]; }
};

template <class G>
struct OracleDistance {
  const G* g;
  VertexId src;
  int operator()(VertexId w) const { return g->distance(src, w); }
};

inline BfsDistance distance_from(const Lattice& l, VertexId src) { return {l.bfs(src)}; }

template <RotationGraph G>
OracleDistance<G> distance_from(const G& g, VertexId src) {
  return {&g, src};
}

// ---------------------------------------------------------------------------
// intervals and hulls

/// Union of all geodesics from u to v; `dv` gives distances to v.
template <RotationGraph G, class DistTo>
VertexSet interval_with(const G& g, VertexId u, VertexId v, const DistTo& dv) {
  const int total = dv(u);
  if (total < 0) throw Error("vertices " + std::to_string(u) + " and " + std::to_string(v) + " are disconnected");
  const int dep_v = g.depth(v);
  VertexSet out{u};
  std::vector<VertexId> layer{u}, next;
  for (int t = 0; t < total; ++t) {
    const int want = total - t - 1;
    next.clear();
    for (VertexId y : layer)
      for (int s = 0; s < kDegree; ++s) {
        const VertexId w = g.neighbor(y, s);
        if (w == kNoVertex) continue;
        const int dd = g.depth(w) - dep_v;
        if (dd > want || -dd > want) continue;
        if (dv(w) == want) next.push_back(w);
      }
    normalize(next);
    out.insert(out.end(), next.begin(), next.end());
    layer.swap(next);
  }
  normalize(out);
  return out;
}

template <RotationGraph G>
VertexSet interval(const G& g, VertexId u, VertexId v) {
  return interval_with(g, u, v, distance_from(g, v));
}

enum class HullMode { one_step, fixpoint };
enum class BoundaryMode { tangent, exposed };
/// Which hull members receive the (expensive) tangent test.
enum class BoundaryScope { hull, source };

struct HullOptions {
  HullMode mode = HullMode::one_step;
  BoundaryScope scope = BoundaryScope::hull;
};

struct HullReport {
  VertexSet source;
  VertexSet hull;
  VertexSet exposed;  // hull members with a neighbor outside the hull
  VertexSet tangent;  // hull members admitting a tangent reflection (within scope)
  BoundaryScope scope = BoundaryScope::hull;

  const VertexSet& boundary(BoundaryMode m) const { return m == BoundaryMode::tangent ? tangent : exposed; }
};

std::string to_string(HullMode m);
std::string to_string(BoundaryMode m);
HullMode parse_hull_mode(const std::string& s);
BoundaryMode parse_boundary_mode(const std::string& s);

template <RotationGraph G>
void check_interior(const G& g, const VertexSet& k) {
  for (VertexId x : k)
    if (g.depth(x) > g.interior_radius())
      throw BallEscape("hull vertex " + std::to_string(x) + " at depth " + std::to_string(g.depth(x)) +
                           " leaves the interior region (radius " + std::to_string(g.interior_radius()) +
                           "); rebuild with a larger radius",
                       x);
}

/// A together with every vertex on a geodesic between two members of A.
template <RotationGraph G>
VertexSet hull_closure(const G& g, const VertexSet& a) {
  VertexSet out = a;
  for (std::size_t q = 0; q < a.size(); ++q) {
    const auto dv = distance_from(g, a[q]);
    for (std::size_t p = 0; p < q; ++p) {
      const VertexSet seg = interval_with(g, a[p], a[q], dv);
      out.insert(out.end(), seg.begin(), seg.end());
    }
  }
  normalize(out);
  check_interior(g, out);
  return out;
}

template <RotationGraph G>
VertexSet convex_closure(const G& g, VertexSet a, HullMode mode) {
  normalize(a);
  check_interior(g, a);
  VertexSet k = hull_closure(g, a);
  if (mode == HullMode::fixpoint)
    while (true) {
      VertexSet next = hull_closure(g, k);
      if (next.size() == k.size()) break;
      k = std::move(next);
    }
  return k;
}

template <RotationGraph G>
VertexSet exposed_boundary(const G& g, const VertexSet& k) {
  VertexSet out;
  for (VertexId x : k)
    for (int s = 0; s < kDegree; ++s) {
      const VertexId w = g.neighbor(x, s);
      if (w == kNoVertex || !member(k, w)) {
        out.push_back(x);
        break;
      }
    }
  return out;
}

/// Hull members within graph distance d of the exposed boundary.
template <RotationGraph G>
VertexSet hull_shell(const G& g, const HullReport& r, int d) {
  std::unordered_map<VertexId, int> seen;
  std::vector<VertexId> frontier = r.exposed, next;
  for (VertexId x : frontier) seen.emplace(x, 0);
  for (int t = 1; t <= d; ++t) {
    next.clear();
    for (VertexId y : frontier)
      for (int s = 0; s < kDegree; ++s) {
        const VertexId w = g.neighbor(y, s);
        if (w != kNoVertex && seen.emplace(w, t).second) next.push_back(w);
      }
    frontier.swap(next);
  }
  VertexSet out;
  for (VertexId x : r.hull)
    if (seen.count(x)) out.push_back(x);
  return out;
}

// ---------------------------------------------------------------------------
// automorphisms

/// A vertex together with one of its edge slots.
struct Flag {
  VertexId vertex = kNoVertex;
  int slot = 0;
  bool operator==(const Flag&) const = default;
};

/// Rotation-system automorphism determined by the image of one flag. With
/// sign +1 slot offsets are preserved, with sign -1 they are negated.
class Automorphism {
 public:
  Automorphism(Flag from, Flag to, int sign) : from_(from), to_(to), sign_(sign) {
    if (sign != 1 && sign != -1) throw Error("automorphism sign must be +1 or -1");
    from_.slot = mod7(from_.slot);
    to_.slot = mod7(to_.slot);
  }

  /// The reflection fixing v and its slot-k neighbor.
  static Automorphism reflection(VertexId v, int k) { return {{v, k}, {v, k}, -1}; }
  /// Rotation about v by `turn` slots.
  static Automorphism rotation(VertexId v, int turn) { return {{v, 0}, {v, turn}, 1}; }

  Flag anchor() const { return from_; }
  Flag image_anchor() const { return to_; }
  int sign() const { return sign_; }
  bool is_reflection() const { return sign_ < 0; }

  /// Slot at the image vertex of the neighbor in slot s, for a vertex whose
  /// frame maps slot `ref` to slot `image_ref`.
  int image_slot(int s, int ref, int image_ref) const { return mod7(image_ref + sign_ * (s - ref)); }

  /// Image of a vertex. Uses a path of geodesic steps towards the anchor and
  /// caches every frame it computes; not safe to share across threads.
  template <RotationGraph G>
  VertexId apply(const G& g, VertexId x) const;

  /// Image of a path whose first vertex is x (any path, edge by edge).
  template <RotationGraph G>
  std::vector<VertexId> apply_path(const G& g, const std::vector<VertexId>& path) const;

  /// Number of cached vertex images.
  std::size_t cached() const { return cache_.size(); }

 private:
  struct Frame {
    VertexId image;
    int ref;
    int image_ref;
  };

  template <RotationGraph G>
  Frame step(const G& g, VertexId y, const Frame& fy, int s, VertexId z) const;
  template <RotationGraph G>
  const Frame& frame(const G& g, VertexId x) const;

  Flag from_, to_;
  int sign_;
  mutable std::unordered_map<VertexId, Frame> cache_;
  mutable std::function<int(VertexId)> to_anchor_;
};

template <RotationGraph G>
Automorphism::Frame Automorphism::step(const G& g, VertexId y, const Frame& fy, int s, VertexId z) const {
  const VertexId zi = g.neighbor(fy.image, image_slot(s, fy.ref, fy.image_ref));
  if (zi == kNoVertex)
    throw BallEscape("image of vertex " + std::to_string(z) + " leaves the ball (past vertex " +
                         std::to_string(fy.image) + ")",
                     fy.image);
  return {zi, g.slot_of(z, y), g.slot_of(zi, fy.image)};
}

template <RotationGraph G>
const Automorphism::Frame& Automorphism::frame(const G& g, VertexId x) const {
  if (cache_.empty()) cache_.emplace(from_.vertex, Frame{to_.vertex, from_.slot, to_.slot});
  if (auto it = cache_.find(x); it != cache_.end()) return it->second;
  if (!to_anchor_) to_anchor_ = distance_from(g, from_.vertex);
  std::vector<VertexId> chain{x};
  while (!cache_.count(chain.back())) {
    const VertexId y = chain.back();
    const int dy = to_anchor_(y);
    VertexId best = kNoVertex;
    for (int s = 0; s < kDegree && best == kNoVertex; ++s) {
      const VertexId w = g.neighbor(y, s);
      if (w != kNoVertex && to_anchor_(w) == dy - 1) best = w;
    }
    if (best == kNoVertex) throw Error("no geodesic step from " + std::to_string(y) + " towards the anchor");
    chain.push_back(best);
  }
  for (std::size_t q = chain.size() - 1; q > 0; --q) {
    const VertexId y = chain[q], z = chain[q - 1];
    const Frame fz = step(g, y, cache_.at(y), g.slot_of(y, z), z);
    cache_.emplace(z, fz);
  }
  return cache_.at(x);
}

template <RotationGraph G>
VertexId Automorphism::apply(const G& g, VertexId x) const {
  return frame(g, x).image;
}

template <RotationGraph G>
std::vector<VertexId> Automorphism::apply_path(const G& g, const std::vector<VertexId>& path) const {
  std::vector<VertexId> out;
  if (path.empty()) return out;
  out.reserve(path.size());
  Frame f = frame(g, path[0]);
  out.push_back(f.image);
  for (std::size_t q = 1; q < path.size(); ++q) {
    const int s = g.slot_of(path[q - 1], path[q]);
    if (s < 0) throw Error("path is not connected at position " + std::to_string(q));
    f = step(g, path[q - 1], f, s, path[q]);
    out.push_back(f.image);
  }
  return out;
}

/// The 7 reflections fixing v, ordered by the slot of the fixed edge.
template <RotationGraph G>
std::vector<Automorphism> reflections_at(const G& g, VertexId v) {
  if (!g.contains(v) || g.depth(v) > g.interior_radius())
    throw BallEscape("vertex " + std::to_string(v) + " lacks a full neighborhood", v);
  std::vector<Automorphism> out;
  for (int k = 0; k < kDegree; ++k) out.push_back(Automorphism::reflection(v, k));
  return out;
}

// ---------------------------------------------------------------------------
// tangent reflections

/// Geodesic tree rooted at x0 spanning a vertex set K (plus the intermediate
/// vertices of the chosen geodesics). Nodes are in nondecreasing distance.
struct GeodesicTree {
  std::vector<VertexId> node;
  std::vector<std::int32_t> parent;  // index into node, -1 for the root
  std::vector<std::int8_t> slot;     // slot of node[i] at its parent
  std::vector<std::uint8_t> in_set;  // node belongs to K
};

template <RotationGraph G>
GeodesicTree geodesic_tree(const G& g, VertexId x0, const VertexSet& k) {
  const auto d0 = distance_from(g, x0);
  const int dep0 = g.depth(x0);
  std::unordered_map<VertexId, int> dist;  // distance from x0, memoized
  const auto dist_of = [&](VertexId w) {
    auto [it, fresh] = dist.emplace(w, 0);
    if (fresh) it->second = d0(w);
    return it->second;
  };

  std::unordered_map<VertexId, VertexId> up;  // child -> parent
  std::vector<std::pair<int, VertexId>> order;
  std::vector<VertexId> stack;
  for (VertexId x : k) {
    VertexId y = x;
    while (y != x0 && !up.count(y)) {
      const int dy = dist_of(y);
      VertexId best = kNoVertex;
      for (int s = 0; s < kDegree && best == kNoVertex; ++s) {
        const VertexId w = g.neighbor(y, s);
        if (w == kNoVertex) continue;
        const int dd = g.depth(w) - dep0;
        if (dd > dy - 1 || -dd > dy - 1) continue;
        if (dist_of(w) == dy - 1) best = w;
      }
      if (best == kNoVertex) throw Error("no geodesic step from " + std::to_string(y));
      up.emplace(y, best);
      y = best;
    }
  }
  order.emplace_back(0, x0);
  for (const auto& [child, par] : up) order.emplace_back(dist.at(child), child);
  std::sort(order.begin(), order.end());

  GeodesicTree t;
  std::unordered_map<VertexId, std::int32_t> index;
  for (const auto& [d, v] : order) {
    index.emplace(v, static_cast<std::int32_t>(t.node.size()));
    t.node.push_back(v);
    t.in_set.push_back(member(k, v) ? 1 : 0);
    if (v == x0) {
      t.parent.push_back(-1);
      t.slot.push_back(-1);
    } else {
      const VertexId p = up.at(v);
      t.parent.push_back(index.at(p));
      t.slot.push_back(static_cast<std::int8_t>(g.slot_of(p, v)));
    }
  }
  return t;
}

/// Whether the reflection fixing x0 and its slot-k neighbor maps K to a set
/// meeting K only in x0. `tree` must span K from x0; `max_depth` is the
/// largest depth in K (images deeper than max_depth + margin cannot return).
template <RotationGraph G>
bool is_tangent(const G& g, const VertexSet& k, VertexId x0, int slot, const GeodesicTree& tree, int max_depth) {
  struct F {
    VertexId image;
    int ref;
    int image_ref;
    bool alive;
  };
  std::vector<F> f(tree.node.size());
  f[0] = {x0, slot, slot, true};
  for (std::size_t q = 1; q < tree.node.size(); ++q) {
    const F& fp = f[static_cast<std::size_t>(tree.parent[q])];
    if (!fp.alive) {
      f[q].alive = false;
      continue;
    }
    const VertexId y = tree.node[static_cast<std::size_t>(tree.parent[q])];
    const VertexId z = tree.node[q];
    const int s = tree.slot[q];
    const VertexId zi = g.neighbor(fp.image, mod7(fp.image_ref - (s - fp.ref)));
    if (zi == kNoVertex) {
      // missing rim neighbor: fine if it would have been pruned anyway
      if (g.depth(fp.image) + 1 > max_depth + kExcursionMargin) {
        f[q].alive = false;
        continue;
      }
      throw BallEscape("reflected hull leaves the ball near vertex " + std::to_string(fp.image), fp.image);
    }
    if (g.depth(zi) > max_depth + kExcursionMargin) {
      f[q].alive = false;
      continue;
    }
    if (tree.in_set[q] && member(k, zi)) return false;
    f[q] = {zi, g.slot_of(z, y), g.slot_of(zi, fp.image), true};
  }
  return true;
}

/// Cheap necessary condition: the reflection fixes the slot-k neighbor and
/// swaps slots k+j and k-j, so none of those pairs may lie inside K.
template <RotationGraph G>
bool locally_tangent(const G& g, const VertexSet& k, VertexId x0, int slot) {
  if (member(k, g.neighbor(x0, slot))) return false;
  for (int j = 1; j <= 3; ++j)
    if (member(k, g.neighbor(x0, slot + j)) && member(k, g.neighbor(x0, slot - j))) return false;
  return true;
}

/// Slots k (in order) whose reflection at x0 is tangent to K.
template <RotationGraph G>
std::vector<int> tangent_slots(const G& g, const VertexSet& k, VertexId x0, bool first_only = false) {
  std::vector<int> out;
  std::optional<GeodesicTree> tree;
  int max_depth = 0;
  for (VertexId x : k) max_depth = std::max(max_depth, g.depth(x));
  for (int s = 0; s < kDegree; ++s) {
    if (!locally_tangent(g, k, x0, s)) continue;
    if (!tree) tree = geodesic_tree(g, x0, k);
    if (is_tangent(g, k, x0, s, *tree, max_depth)) {
      out.push_back(s);
      if (first_only) break;
    }
  }
  return out;
}

/// First reflection at x0 (by slot) with g(K) meeting K exactly in x0.
template <RotationGraph G>
std::optional<Automorphism> tangent_reflection(const G& g, const VertexSet& k, VertexId x0) {
  if (!member(k, x0)) throw Error("tangent point must belong to the set");
  const std::vector<int> s = tangent_slots(g, k, x0, true);
  if (s.empty()) return std::nullopt;
  return Automorphism::reflection(x0, s.front());
}

template <RotationGraph G>
HullReport convex_hull(const G& g, const VertexSet& a, const HullOptions& opt = {}) {
  if (a.empty()) throw Error("convex hull of an empty set");
  HullReport r;
  r.source = a;
  normalize(r.source);
  r.hull = convex_closure(g, r.source, opt.mode);
  r.exposed = exposed_boundary(g, r.hull);
  r.scope = opt.scope;
  const VertexSet& candidates = opt.scope == BoundaryScope::hull ? r.hull : r.source;
  for (VertexId x : candidates)
    if (!tangent_slots(g, r.hull, x, true).empty()) r.tangent.push_back(x);
  return r;
}

// ---------------------------------------------------------------------------
// audits on explicit balls

struct ThinnessReport {
  int r_audit = 0;
  int delta = 1;
  int max_thinness = 0;
  std::array<VertexId, 3> worst{kRoot, kRoot, kRoot};  // (u, v, x)
  std::uint64_t triples = 0;
  bool pass = true;
};

/// Interval-based thinness over all triples of the r_audit-ball.
ThinnessReport thinness_audit(const Lattice& l, int r_audit, int delta);
/// Plain triple loop over the distance matrix; reference for the above.
ThinnessReport thinness_audit_serial(const Lattice& l, int r_audit, int delta);

/// Largest depth reached by a geodesic between two vertices of depth <= r,
/// minus r. Measured exhaustively on the r-ball.
int geodesic_excursion(const Lattice& l, int r);

struct DistortionReport {
  int radius = 0;
  std::uint64_t pairs = 0;
  double slope = 0.0;       // least squares: graph ~ slope * (hyp / ell) + intercept
  double intercept = 0.0;
  double additive_k = 0.0;  // max(graph - slope * hyp / ell)
  double max_ratio = 0.0;   // max graph / (hyp / ell) over distinct pairs
  double min_ratio = 0.0;   // min of the same ratio; >= 1 up to rounding
  double adjacent_error = 0.0;  // max |hyp - ell| over edges
};

DistortionReport metric_distortion(const Lattice& l);

}  // namespace hsaw
