#pragma once

// Self-avoiding walks from the root: enumeration, exact uniform sampling,
// the suffix reflection R_i and a pivot chain.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hsaw/graph.hpp"
#include "hsaw/rng.hpp"

namespace hsaw {

/// gamma(0..n) with gamma(0) = root.
using Walk = std::vector<VertexId>;
using Count = boost::multiprecision::cpp_int;
using CountVector = std::vector<Count>;

/// Slot sequence packed 3 bits per step, first step most significant, so
/// slot-order enumeration produces codes in increasing order.
using WalkCode = std::uint64_t;
inline constexpr int kMaxCodeLength = 21;

inline constexpr int kDefaultPrefixDepth = 4;

template <RotationGraph G>
std::string walk_error(const G& g, const Walk& w) {
  if (w.empty()) return "empty walk";
  if (w.front() != kRoot) return "walk does not start at the root";
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!g.contains(w[k])) return "vertex " + std::to_string(w[k]) + " is outside the lattice";
    if (k > 0 && g.slot_of(w[k - 1], w[k]) < 0)
      return "steps " + std::to_string(k - 1) + " and " + std::to_string(k) + " are not adjacent";
  }
  Walk sorted = w;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return "walk revisits a vertex";
  return {};
}

template <RotationGraph G>
bool is_walk(const G& g, const Walk& w) {
  return walk_error(g, w).empty();
}

template <RotationGraph G>
void check_walk(const G& g, const Walk& w) {
  if (const std::string e = walk_error(g, w); !e.empty()) throw Error(e);
}

template <RotationGraph G>
int displacement(const G& g, const Walk& w) {
  return g.distance(w.front(), w.back());
}

template <RotationGraph G>
WalkCode walk_code(const G& g, const Walk& w) {
  if (w.size() > kMaxCodeLength + 1) throw Error("walk too long for a 64-bit code");
  WalkCode c = 0;
  for (std::size_t k = 1; k < w.size(); ++k) c = (c << 3) | static_cast<WalkCode>(g.slot_of(w[k - 1], w[k]));
  return c;
}

template <RotationGraph G>
Walk decode_walk(const G& g, WalkCode code, int n) {
  Walk w{kRoot};
  for (int k = n - 1; k >= 0; --k) w.push_back(g.neighbor(w.back(), static_cast<int>((code >> (3 * k)) & 7)));
  return w;
}

/// Walk that moves to a deeper vertex at every step.
template <RotationGraph G>
Walk straight_walk(const G& g, int n) {
  Walk w{kRoot};
  for (int k = 0; k < n; ++k) {
    const Rotation rot = g.rotation(w.back());
    const auto it = std::find_if(rot.begin(), rot.end(),
                                 [&](VertexId x) { return x != kNoVertex && g.depth(x) == k + 1; });
    if (it == rot.end()) throw BallEscape("no outward step from vertex " + std::to_string(w.back()), w.back());
    w.push_back(*it);
  }
  return w;
}

// ---------------------------------------------------------------------------
// enumeration

template <RotationGraph G>
void check_length(const G& g, int n) {
  if (n < 0) throw Error("walk length must be nonnegative");
  if (n > g.interior_radius())
    throw BallEscape("walks of length " + std::to_string(n) + " need a lattice of interior radius >= n (have " +
                         std::to_string(g.interior_radius()) + ")",
                     kNoVertex);
}

/// Calls f(path) for path and every self-avoiding extension of it up to
/// `target` vertices, depth first in slot order.
template <RotationGraph G, class F>
void extend_walks(const G& g, Walk& path, std::size_t target, F& f) {
  f(path);
  if (path.size() >= target) return;
  const Rotation rot = g.rotation(path.back());
  for (VertexId w : rot) {
    if (w == kNoVertex || std::find(path.begin(), path.end(), w) != path.end()) continue;
    path.push_back(w);
    extend_walks(g, path, target, f);
    path.pop_back();
  }
}

/// All walks of length p, in enumeration order.
template <RotationGraph G>
std::vector<Walk> walk_prefixes(const G& g, int p) {
  std::vector<Walk> out;
  Walk path{kRoot};
  auto collect = [&](const Walk& w) {
    if (w.size() == static_cast<std::size_t>(p) + 1) out.push_back(w);
  };
  extend_walks(g, path, static_cast<std::size_t>(p) + 1, collect);
  return out;
}

/// Counts c_0..c_n; `visit(walk)` sees every n-step walk once, in code order.
template <RotationGraph G, class Visitor>
CountVector enumerate(const G& g, int n, Visitor&& visit) {
  check_length(g, n);
  std::vector<std::uint64_t> c(static_cast<std::size_t>(n) + 1, 0);
  Walk path{kRoot};
  auto f = [&](const Walk& w) {
    ++c[w.size() - 1];
    if (w.size() == static_cast<std::size_t>(n) + 1) visit(static_cast<const Walk&>(w));
  };
  extend_walks(g, path, static_cast<std::size_t>(n) + 1, f);
  return CountVector(c.begin(), c.end());
}

template <RotationGraph G>
CountVector enumerate(const G& g, int n) {
  return enumerate(g, n, [](const Walk&) {});
}

/// Plain single-threaded count; reference for count_walks.
template <RotationGraph G>
CountVector count_walks_serial(const G& g, int n) {
  return enumerate(g, n);
}

/// Count partitioned over all walks of length `prefix_depth`, one OpenMP task
/// per prefix; partial counts are added in prefix order.
template <RotationGraph G>
CountVector count_walks(const G& g, int n, int prefix_depth = kDefaultPrefixDepth) {
  check_length(g, n);
  const int p = std::min(prefix_depth, n);
  const CountVector head = enumerate(g, p);
  const std::vector<Walk> prefixes = walk_prefixes(g, p);
  const auto rows = static_cast<std::ptrdiff_t>(prefixes.size());
  std::vector<std::vector<std::uint64_t>> part(prefixes.size(), std::vector<std::uint64_t>(static_cast<std::size_t>(n) + 1, 0));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < rows; ++j) {
    Walk path = prefixes[static_cast<std::size_t>(j)];
    std::vector<std::uint64_t>& c = part[static_cast<std::size_t>(j)];
    auto f = [&](const Walk& w) { ++c[w.size() - 1]; };
    extend_walks(g, path, static_cast<std::size_t>(n) + 1, f);
  }
  CountVector out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= p; ++k) out[static_cast<std::size_t>(k)] = head[static_cast<std::size_t>(k)];
  for (const auto& c : part)
    for (int k = p + 1; k <= n; ++k) out[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(k)];
  return out;
}

/// Deterministic parallel fold over all n-step walks: one accumulator per
/// length-p prefix, visited in parallel, merged in prefix order.
template <RotationGraph G, class Acc, class Visit, class Merge>
Acc fold_walks(const G& g, int n, const Acc& init, Visit visit, Merge merge, int prefix_depth = kDefaultPrefixDepth) {
  check_length(g, n);
  const int p = std::min(prefix_depth, n);
  const std::vector<Walk> prefixes = walk_prefixes(g, p);
  const auto rows = static_cast<std::ptrdiff_t>(prefixes.size());
  std::vector<Acc> part(prefixes.size(), init);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < rows; ++j) {
    Walk path = prefixes[static_cast<std::size_t>(j)];
    Acc& acc = part[static_cast<std::size_t>(j)];
    auto f = [&](const Walk& w) {
      if (w.size() == static_cast<std::size_t>(n) + 1) visit(acc, w);
    };
    extend_walks(g, path, static_cast<std::size_t>(n) + 1, f);
  }
  Acc out = init;
  for (Acc& a : part) merge(out, std::move(a));
  return out;
}

/// Same fold on one thread, walking the tree directly.
template <RotationGraph G, class Acc, class Visit>
Acc fold_walks_serial(const G& g, int n, Acc acc, Visit visit) {
  enumerate(g, n, [&](const Walk& w) { visit(acc, w); });
  return acc;
}

/// Number of self-avoiding continuations of `path` by exactly m steps.
template <RotationGraph G>
std::uint64_t count_extensions(const G& g, Walk& path, int m) {
  if (m == 0) return 1;
  std::uint64_t total = 0;
  const Rotation rot = g.rotation(path.back());
  for (VertexId w : rot) {
    if (w == kNoVertex || std::find(path.begin(), path.end(), w) != path.end()) continue;
    path.push_back(w);
    total += count_extensions(g, path, m - 1);
    path.pop_back();
  }
  return total;
}

// ---------------------------------------------------------------------------
// exact uniform sampling

/// Unranking sampler. Completion counts are stored in a trie over the first
/// min(n, trie_depth) steps and recomputed by counting below it. Building
/// costs one full count of the n-step walks.
template <RotationGraph G>
class ExactSampler {
 public:
  ExactSampler(const G& g, int n, int trie_depth = 8) : g_(&g), n_(n) {
    check_length(g, n);
    if (n > 20) throw Error("exact sampling is limited to n <= 20 (64-bit counts)");
    depth_ = std::min(n, trie_depth);
    level_.resize(static_cast<std::size_t>(depth_) + 1);
    level_[0].push_back({kRoot, 0, 0, 0, 0, 0});
    Walk path;
    for (int k = 0; k < depth_; ++k) {
      auto& cur = level_[static_cast<std::size_t>(k)];
      auto& nxt = level_[static_cast<std::size_t>(k) + 1];
      for (std::uint32_t a = 0; a < cur.size(); ++a) {
        path_to(k, a, path);
        cur[a].first_child = static_cast<std::uint32_t>(nxt.size());
        const Rotation rot = g.rotation(path.back());
        for (int s = 0; s < kDegree; ++s) {
          const VertexId w = rot[static_cast<std::size_t>(s)];
          if (w == kNoVertex || std::find(path.begin(), path.end(), w) != path.end()) continue;
          nxt.push_back({w, a, 0, 0, static_cast<std::uint8_t>(s), 0});
          ++cur[a].children;
        }
      }
    }
    auto& leaves = level_[static_cast<std::size_t>(depth_)];
    const auto nleaves = static_cast<std::ptrdiff_t>(leaves.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t a = 0; a < nleaves; ++a) {
      Walk p;
      path_to(depth_, static_cast<std::uint32_t>(a), p);
      leaves[static_cast<std::size_t>(a)].count = count_extensions(*g_, p, n_ - depth_);
    }
    for (int k = depth_ - 1; k >= 0; --k)
      for (Node& node : level_[static_cast<std::size_t>(k)])
        for (std::uint32_t c = 0; c < node.children; ++c)
          node.count += level_[static_cast<std::size_t>(k) + 1][node.first_child + c].count;
  }

  int length() const { return n_; }
  std::uint64_t total() const { return level_[0][0].count; }

  /// The walk of rank r in enumeration (code) order.
  Walk unrank(std::uint64_t r) const {
    if (r >= total()) throw std::out_of_range("walk rank out of range");
    std::uint32_t a = 0;
    for (int k = 0; k < depth_; ++k) {
      const Node& node = level_[static_cast<std::size_t>(k)][a];
      std::uint32_t c = node.first_child;
      while (r >= level_[static_cast<std::size_t>(k) + 1][c].count) {
        r -= level_[static_cast<std::size_t>(k) + 1][c].count;
        ++c;
      }
      a = c;
    }
    Walk path;
    path_to(depth_, a, path);
    while (static_cast<int>(path.size()) <= n_) {
      const Rotation rot = g_->rotation(path.back());
      const int left = n_ - static_cast<int>(path.size());
      for (VertexId w : rot) {
        if (w == kNoVertex || std::find(path.begin(), path.end(), w) != path.end()) continue;
        path.push_back(w);
        const std::uint64_t c = count_extensions(*g_, path, left);
        if (r < c) break;
        r -= c;
        path.pop_back();
      }
    }
    return path;
  }

  Walk sample(Rng& rng) const { return unrank(rng.below(total())); }

 private:
  struct Node {
    VertexId vertex;
    std::uint32_t parent;
    std::uint32_t first_child;
    std::uint8_t children;
    std::uint8_t slot;
    std::uint64_t count;
  };

  void path_to(int k, std::uint32_t a, Walk& out) const {
    out.assign(static_cast<std::size_t>(k) + 1, kRoot);
    for (int q = k; q >= 0; --q) {
      const Node& node = level_[static_cast<std::size_t>(q)][a];
      out[static_cast<std::size_t>(q)] = node.vertex;
      a = node.parent;
    }
  }

  const G* g_;
  int n_;
  int depth_ = 0;
  std::vector<std::vector<Node>> level_;
};

/// k independent uniform walks; stream 0 of `seed`.
template <RotationGraph G>
std::vector<Walk> sample_exact(const G& g, int n, std::size_t k, std::uint64_t seed) {
  const ExactSampler<G> s(g, n);
  Rng rng(seed);
  std::vector<Walk> out;
  out.reserve(k);
  for (std::size_t q = 0; q < k; ++q) out.push_back(s.sample(rng));
  return out;
}

// ---------------------------------------------------------------------------
// symmetric images of suffixes

/// Replaces w[i+1..] by its image under the automorphism fixing w[i] whose
/// frame there maps slot `ref` to `image_ref`. Stops early, returning false,
/// when stop(image_vertex, index) is true.
template <RotationGraph G, class Stop>
bool map_suffix(const G& g, const Walk& w, std::size_t i, int ref, int image_ref, int sign, Walk& out, Stop&& stop) {
  out.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  VertexId y = w[i], yi = w[i];
  int r = ref, ri = image_ref;
  for (std::size_t k = i + 1; k < w.size(); ++k) {
    const VertexId z = w[k];
    const int s = g.slot_of(y, z);
    const VertexId zi = g.neighbor(yi, ri + sign * (s - r));
    if (zi == kNoVertex) throw BallEscape("reflected walk leaves the ball at vertex " + std::to_string(yi), yi);
    if (stop(zi, k)) return false;
    out.push_back(zi);
    r = g.slot_of(z, y);
    ri = g.slot_of(zi, yi);
    y = z;
    yi = zi;
  }
  return true;
}

/// Hull and first tangent slot at every walk vertex.
struct WalkBoundary {
  VertexSet hull;
  std::vector<std::int8_t> tangent_slot;  // first tangent slot at gamma(j), -1 if none
  std::vector<std::uint8_t> exposed;      // gamma(j) has a neighbor outside the hull
};

template <RotationGraph G>
WalkBoundary walk_boundary(const G& g, const Walk& w, HullMode mode = HullMode::one_step) {
  WalkBoundary b;
  b.hull = convex_closure(g, VertexSet(w.begin(), w.end()), mode);
  b.tangent_slot.resize(w.size());
  b.exposed.resize(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const std::vector<int> s = tangent_slots(g, b.hull, w[j], true);
    b.tangent_slot[j] = static_cast<std::int8_t>(s.empty() ? -1 : s.front());
    const Rotation rot = g.rotation(w[j]);
    b.exposed[j] = std::any_of(rot.begin(), rot.end(), [&](VertexId x) { return x == kNoVertex || !member(b.hull, x); });
  }
  return b;
}

/// R_i: reflect gamma(i..n) in the first tangent reflection at gamma(i).
template <RotationGraph G>
Walk reflect_at(const G& g, const Walk& w, int i, const WalkBoundary& b) {
  const int n = static_cast<int>(w.size()) - 1;
  if (i <= 0 || i >= n) throw Error("reflection index must satisfy 0 < i < n");
  const int k = b.tangent_slot[static_cast<std::size_t>(i)];
  if (k < 0) return w;
  Walk out;
  map_suffix(g, w, static_cast<std::size_t>(i), k, k, -1, out, [](VertexId, std::size_t) { return false; });
  if (!is_walk(g, out)) throw std::logic_error("tangent reflection produced an invalid walk");
  return out;
}

template <RotationGraph G>
Walk reflect_at(const G& g, const Walk& w, int i, HullMode mode = HullMode::one_step) {
  return reflect_at(g, w, i, walk_boundary(g, w, mode));
}

// ---------------------------------------------------------------------------
// exhaustive reflection data

/// Everything about R_i over Lambda_n needed by the verification suites,
/// in enumeration order. Per-walk arrays are flattened.
struct ReflectionTable {
  int n = 0;
  HullMode mode = HullMode::one_step;
  std::vector<WalkCode> code;
  std::vector<std::int8_t> slot;        // (n+1) per walk: first tangent slot at gamma(j)
  std::vector<std::uint8_t> exposed;    // (n+1) per walk
  std::vector<std::uint8_t> depth;      // (n+1) per walk: dist(root, gamma(j))
  std::vector<std::uint8_t> to_end;     // (n+1) per walk: dist(gamma(j), gamma(n))
  std::vector<WalkCode> image;          // (n-1) per walk: code of R_i gamma, i = 1..n-1
  std::vector<std::uint8_t> image_disp; // (n-1) per walk: displacement of R_i gamma
  std::uint64_t prefix_violations = 0;  // R_i gamma differs from gamma before i
  std::uint64_t invalid_images = 0;     // R_i gamma not a self-avoiding walk

  std::size_t size() const { return code.size(); }
  std::size_t stride() const { return static_cast<std::size_t>(n) + 1; }
};

template <RotationGraph G>
ReflectionTable reflection_table(const G& g, int n, HullMode mode = HullMode::one_step) {
  if (n < 2) throw Error("reflection table needs n >= 2");
  if (n > kMaxCodeLength) throw Error("walk too long for a 64-bit code");
  ReflectionTable init;
  init.n = n;
  init.mode = mode;
  auto visit = [&g, n, mode](ReflectionTable& t, const Walk& w) {
    const WalkBoundary b = walk_boundary(g, w, mode);
    t.code.push_back(walk_code(g, w));
    for (int j = 0; j <= n; ++j) {
      t.slot.push_back(b.tangent_slot[static_cast<std::size_t>(j)]);
      t.exposed.push_back(b.exposed[static_cast<std::size_t>(j)]);
      t.depth.push_back(static_cast<std::uint8_t>(g.depth(w[static_cast<std::size_t>(j)])));
      t.to_end.push_back(static_cast<std::uint8_t>(g.distance(w[static_cast<std::size_t>(j)], w.back())));
    }
    Walk img;
    for (int i = 1; i < n; ++i) {
      const int k = b.tangent_slot[static_cast<std::size_t>(i)];
      if (k < 0) {
        img = w;
      } else {
        map_suffix(g, w, static_cast<std::size_t>(i), k, k, -1, img, [](VertexId, std::size_t) { return false; });
      }
      if (!std::equal(w.begin(), w.begin() + i + 1, img.begin())) ++t.prefix_violations;
      if (!is_walk(g, img)) ++t.invalid_images;
      t.image.push_back(walk_code(g, img));
      t.image_disp.push_back(static_cast<std::uint8_t>(g.depth(img.back())));
    }
  };
  auto merge = [](ReflectionTable& a, ReflectionTable&& b) {
    const auto cat = [](auto& x, const auto& y) { x.insert(x.end(), y.begin(), y.end()); };
    cat(a.code, b.code);
    cat(a.slot, b.slot);
    cat(a.exposed, b.exposed);
    cat(a.depth, b.depth);
    cat(a.to_end, b.to_end);
    cat(a.image, b.image);
    cat(a.image_disp, b.image_disp);
    a.prefix_violations += b.prefix_violations;
    a.invalid_images += b.invalid_images;
  };
  return fold_walks(g, n, init, visit, merge);
}

/// Histogram of |R_i^{-1}(gamma)| over gamma in Lambda_n (fiber size -> walks).
std::map<std::uint64_t, std::uint64_t> fiber_histogram(const ReflectionTable& t, int i);

template <RotationGraph G>
std::map<std::uint64_t, std::uint64_t> fiber_histogram(const G& g, int n, int i) {
  return fiber_histogram(reflection_table(g, n), i);
}

/// Whether every R_i gamma (i = 1..n-1) is a member of Lambda_n.
bool images_in_lambda(const ReflectionTable& t);

// ---------------------------------------------------------------------------
// pivot chain

enum class MoveSet { reflections, dihedral };

std::string to_string(MoveSet m);
MoveSet parse_move_set(const std::string& s);

/// Metropolis chain on Lambda_n. A step picks i uniform in 0..n-1 and a
/// symmetry fixing gamma(i) uniformly (7 reflections, or those plus the 7
/// rotations), maps the suffix and accepts iff the result is self-avoiding.
/// Every move is its own inverse or has its inverse in the same set with the
/// same probability, so the uniform measure is stationary.
template <RotationGraph G>
class PivotChain {
 public:
  PivotChain(const G& g, int n, std::uint64_t seed, MoveSet moves, std::uint64_t stream = 0)
      : g_(&g), n_(n), moves_(moves), rng_(seed, stream), walk_(straight_walk(g, n)) {
    if (n < 1) throw Error("pivot chain needs n >= 1");
    for (std::size_t k = 0; k < walk_.size(); ++k) pos_.emplace(walk_[k], k);
  }

  bool step() {
    ++proposed_;
    const std::size_t i = rng_.below(static_cast<std::uint64_t>(n_));
    const int e = static_cast<int>(rng_.below(moves_ == MoveSet::reflections ? 7 : 14));
    const int ref = e < 7 ? e : 0;
    const int image_ref = e < 7 ? e : e - 7;
    const int sign = e < 7 ? -1 : 1;
    bool ok = false;
    try {
      ok = map_suffix(*g_, walk_, i, ref, image_ref, sign, proposal_, [&](VertexId z, std::size_t) {
        const auto it = pos_.find(z);
        return it != pos_.end() && it->second < i;
      });
    } catch (const BallEscape&) {
      ok = false;
    }
    if (!ok) return false;
    for (std::size_t k = i + 1; k < walk_.size(); ++k) pos_.erase(walk_[k]);
    for (std::size_t k = i + 1; k < walk_.size(); ++k) pos_.emplace(proposal_[k], k);
    walk_.swap(proposal_);
    ++accepted_;
    return true;
  }

  void run(std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) step();
  }

  const Walk& walk() const { return walk_; }
  int length() const { return n_; }
  std::uint64_t proposed() const { return proposed_; }
  std::uint64_t accepted() const { return accepted_; }
  double acceptance_rate() const { return proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0; }

 private:
  const G* g_;
  int n_;
  MoveSet moves_;
  Rng rng_;
  Walk walk_, proposal_;
  std::unordered_map<VertexId, std::size_t> pos_;
  std::uint64_t proposed_ = 0, accepted_ = 0;
};

}  // namespace hsaw
