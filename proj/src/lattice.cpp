#include "hsaw/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <unordered_map>

namespace hsaw {

Lattice::Lattice(int radius, BuildMode mode, std::vector<Rotation> rot, std::vector<int> depth,
                 std::optional<std::vector<geom::HPoint>> coords)
    : radius_(radius), mode_(mode), rot_(std::move(rot)), depth_(std::move(depth)), coords_(std::move(coords)) {
  if (depth_.size() != rot_.size()) throw Error("lattice: depth table size mismatch");
  if (coords_ && coords_->size() != rot_.size()) throw Error("lattice: coordinate table size mismatch");
}

int Lattice::slot_of(VertexId v, VertexId w) const {
  const Rotation& r = rot_[v];
  for (int s = 0; s < kDegree; ++s)
    if (r[static_cast<std::size_t>(s)] == w) return s;
  return -1;
}

int Lattice::degree(VertexId v) const {
  return static_cast<int>(std::count_if(rot_[v].begin(), rot_[v].end(), [](VertexId w) { return w != kNoVertex; }));
}

std::vector<int> Lattice::bfs(VertexId src) const {
  std::vector<int> dist(rot_.size(), -1);
  std::vector<VertexId> queue{src};
  dist[src] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId v = queue[head];
    for (VertexId w : rot_[v])
      if (w != kNoVertex && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

int Lattice::distance(VertexId u, VertexId v) const {
  if (u == v) return 0;
  std::vector<int> dist(rot_.size(), -1);
  std::vector<VertexId> queue{u};
  dist[u] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId x = queue[head];
    for (VertexId w : rot_[x])
      if (w != kNoVertex && dist[w] < 0) {
        dist[w] = dist[x] + 1;
        if (w == v) return dist[w];
        queue.push_back(w);
      }
  }
  return -1;
}

const geom::HPoint& Lattice::coord(VertexId v) const { return coordinates()[v]; }

const std::vector<geom::HPoint>& Lattice::coordinates() const {
  if (!coords_) throw Error("lattice has no coordinates (build geometrically or attach them)");
  return *coords_;
}

namespace {

void check_radius(int radius) {
  if (radius < 1 || radius > kMaxBallRadius)
    throw Error("ball radius " + std::to_string(radius) + " outside [1, " + std::to_string(kMaxBallRadius) + "]");
}

std::vector<std::size_t> combinatorial_layer_sizes(int radius) {
  std::vector<std::size_t> a{1, 7, 21};
  while (static_cast<int>(a.size()) <= radius) {
    const std::size_t k = a.size() - 1;
    a.push_back(3 * a[k] - a[k - 1]);
  }
  a.resize(static_cast<std::size_t>(radius) + 1);
  return a;
}

void check_memory(int radius) {
  std::size_t total = 0;
  for (std::size_t s : combinatorial_layer_sizes(radius)) total += s;
  if (total > kMaxBallVertices)
    throw Error("ball of radius " + std::to_string(radius) + " has " + std::to_string(total) +
                " vertices, above the in-memory limit of " + std::to_string(kMaxBallVertices));
}

// Layer-by-layer growth. A layer vertex with p parents has two layer
// neighbors and therefore 5 - p children; its first child is shared with the
// previous vertex on the layer and its last child with the next one.
Lattice build_combinatorial(int radius) {
  struct ParentInfo {
    VertexId low = kNoVertex;
    VertexId high = kNoVertex;
  };

  std::vector<Rotation> rot;
  std::vector<int> depth;
  std::vector<ParentInfo> parent;
  Rotation empty;
  empty.fill(kNoVertex);

  rot.push_back(empty);
  depth.push_back(0);
  parent.push_back({});
  for (int s = 0; s < kDegree; ++s) {
    rot[kRoot][static_cast<std::size_t>(s)] = static_cast<VertexId>(1 + s);
    rot.push_back(empty);
    depth.push_back(1);
    parent.push_back({kRoot, kRoot});
  }

  VertexId layer_begin = 1;
  std::size_t layer_len = 7;
  for (int k = 1; k <= radius; ++k) {
    const VertexId next_begin = layer_begin + layer_len;
    std::size_t next_len = 0;
    if (k < radius) {
      for (std::size_t j = 0; j < layer_len; ++j) {
        const ParentInfo& p = parent[layer_begin + j];
        const int parents = p.low == p.high ? 1 : 2;
        next_len += static_cast<std::size_t>(5 - parents - 1);
      }
      rot.resize(rot.size() + next_len, empty);
      depth.resize(depth.size() + next_len, k + 1);
      parent.resize(parent.size() + next_len);
    }

    std::size_t cursor = 0;
    for (std::size_t j = 0; j < layer_len; ++j) {
      const VertexId v = layer_begin + j;
      const ParentInfo p = parent[v];
      const bool shared = p.low != p.high;
      const int children = 5 - (shared ? 2 : 1);
      const VertexId prev = layer_begin + (j + layer_len - 1) % layer_len;
      const VertexId next = layer_begin + (j + 1) % layer_len;

      std::array<VertexId, 4> child;
      child.fill(kNoVertex);
      if (k < radius) {
        for (int q = 0; q < children; ++q) child[static_cast<std::size_t>(q)] = next_begin + (cursor + static_cast<std::size_t>(q)) % next_len;
        parent[child[0]] = {layer_begin + (j + layer_len - 1) % layer_len, v};
        for (int q = 1; q + 1 < children; ++q) parent[child[static_cast<std::size_t>(q)]] = {v, v};
        cursor += static_cast<std::size_t>(children - 1);
      }
      if (!shared)
        rot[v] = {p.low, prev, child[0], child[1], child[2], child[3], next};
      else
        rot[v] = {p.low, prev, child[0], child[1], child[2], next, p.high};
    }
    layer_begin = next_begin;
    layer_len = next_len;
  }
  return Lattice(radius, BuildMode::combinatorial, std::move(rot), std::move(depth));
}

class DiskGrid {
 public:
  VertexId find(const geom::HPoint& p, const std::vector<geom::HPoint>& coords) const {
    const geom::DiskPoint d = geom::to_disk(p);
    const auto [ix, iy] = cell(d);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(ix + dx, iy + dy));
        if (it == cells_.end()) continue;
        for (VertexId w : it->second) {
          const geom::DiskPoint e = geom::to_disk(coords[w]);
          if (std::hypot(d.u - e.u, d.v - e.v) >= geom::kDedupTol) continue;
          if (geom::hyp_dist(p, coords[w]) > 1e-3)
            throw geom::DriftError("orbit points collide in the disk chart but are " +
                                   std::to_string(geom::hyp_dist(p, coords[w])) +
                                   " apart; chart resolution exhausted");
          return w;
        }
      }
    return kNoVertex;
  }

  void insert(VertexId v, const geom::HPoint& p) {
    const auto [ix, iy] = cell(geom::to_disk(p));
    cells_[key(ix, iy)].push_back(v);
  }

 private:
  static std::pair<std::int64_t, std::int64_t> cell(const geom::DiskPoint& d) {
    return {static_cast<std::int64_t>(std::floor(d.u / geom::kDedupTol)),
            static_cast<std::int64_t>(std::floor(d.v / geom::kDedupTol))};
  }
  static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix) << 32) ^ (static_cast<std::uint64_t>(iy) & 0xffffffffULL);
  }
  std::unordered_map<std::uint64_t, std::vector<VertexId>> cells_;
};

Lattice build_geometric(int radius) {
  using geom::IsomMatrix;
  const geom::TriangleMirrors tm = geom::triangle_mirrors();
  const IsomMatrix se = IsomMatrix::reflection(tm.edge);
  const IsomMatrix sb = IsomMatrix::reflection(tm.bisector);
  const IsomMatrix sp = IsomMatrix::reflection(tm.perpendicular);
  const IsomMatrix turn = sb * se;  // rotation by 2 pi / 7 about the basepoint

  // step[t] maps the basepoint to its slot-t neighbor and slot 0 back to the basepoint.
  std::array<IsomMatrix, kDegree> step;
  IsomMatrix power;
  for (int t = 0; t < kDegree; ++t) {
    step[static_cast<std::size_t>(t)] = geom::renormalize(power * sp * se);
    power = geom::renormalize(power * turn);
  }
  std::array<geom::HPoint, kDegree> around;
  for (int t = 0; t < kDegree; ++t) around[static_cast<std::size_t>(t)] = step[static_cast<std::size_t>(t)].apply(geom::HPoint{});

  const double ell = geom::edge_length();
  const double sector = 2.0 * std::numbers::pi / kDegree;

  Rotation empty;
  empty.fill(kNoVertex);
  std::vector<Rotation> rot{empty};
  std::vector<int> depth{0};
  std::vector<geom::HPoint> coords{geom::HPoint{}};
  std::vector<IsomMatrix> frame{IsomMatrix{}};
  DiskGrid grid;
  grid.insert(kRoot, coords[0]);

  for (VertexId v = 0; v < rot.size(); ++v) {
    const IsomMatrix mv = frame[v];
    const IsomMatrix back = mv.lorentz_inverse();
    for (int t = 0; t < kDegree; ++t) {
      const geom::HPoint p = mv.apply(around[static_cast<std::size_t>(t)]);
      VertexId w = grid.find(p, coords);
      if (w == kNoVertex) {
        if (depth[v] >= radius) continue;
        w = rot.size();
        rot.push_back(empty);
        depth.push_back(depth[v] + 1);
        frame.push_back(geom::renormalize(mv * step[static_cast<std::size_t>(t)]));
        coords.push_back(frame.back().apply(geom::HPoint{}));
        grid.insert(w, coords.back());
      }
      const double d = geom::hyp_dist(coords[v], coords[w]);
      if (std::abs(d - ell) > 1e-4)
        throw geom::DriftError("neighbor at distance " + std::to_string(d) + " instead of the edge length");
      const geom::HPoint local = back.apply(coords[w]);
      const double angle = std::atan2(local.x2, local.x1);
      const int slot = mod7(static_cast<int>(std::lround(angle / sector)));
      VertexId& cellref = rot[v][static_cast<std::size_t>(slot)];
      if (cellref != kNoVertex && cellref != w)
        throw geom::DriftError("two neighbors share an angular slot at vertex " + std::to_string(v));
      cellref = w;
    }
  }
  return Lattice(radius, BuildMode::geometric, std::move(rot), std::move(depth), std::move(coords));
}

// Breadth-first relabeling from the root flag (root_slot, orientation).
// Returns the encoding; `order` receives the visiting order (new label -> old id).
std::vector<std::int32_t> encode(const Lattice& l, int root_slot, int orientation, std::vector<VertexId>* order) {
  std::vector<std::int32_t> label(l.size(), -1);
  std::vector<int> ref(l.size(), 0);
  std::vector<VertexId> seq{kRoot};
  label[kRoot] = 0;
  ref[kRoot] = root_slot;
  std::vector<std::int32_t> enc;
  enc.reserve(l.size() * kDegree);
  for (std::size_t head = 0; head < seq.size(); ++head) {
    const VertexId v = seq[head];
    for (int t = 0; t < kDegree; ++t) {
      const VertexId w = l.neighbor(v, ref[v] + orientation * t);
      if (w == kNoVertex) {
        enc.push_back(-1);
        continue;
      }
      if (label[w] < 0) {
        label[w] = static_cast<std::int32_t>(seq.size());
        ref[w] = l.slot_of(w, v);
        seq.push_back(w);
      }
      enc.push_back(label[w]);
    }
  }
  if (order) *order = std::move(seq);
  return enc;
}

std::string fnv1a_hex(const std::vector<std::int32_t>& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int32_t x : data) {
    const auto u = static_cast<std::uint32_t>(x);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double round12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

Lattice build_ball(int radius, BuildMode mode) {
  check_radius(radius);
  check_memory(radius);
  return mode == BuildMode::combinatorial ? build_combinatorial(radius) : build_geometric(radius);
}

std::vector<std::size_t> layer_sizes(const Lattice& lattice) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(lattice.radius()) + 1, 0);
  for (VertexId v = 0; v < lattice.size(); ++v) ++sizes[static_cast<std::size_t>(lattice.depth(v))];
  return sizes;
}

std::string canonical_digest(const Lattice& lattice) {
  std::vector<std::int32_t> best;
  for (int orientation : {1, -1})
    for (int s = 0; s < kDegree; ++s) {
      std::vector<std::int32_t> enc = encode(lattice, s, orientation, nullptr);
      if (best.empty() || enc < best) best = std::move(enc);
    }
  return fnv1a_hex(best);
}

std::vector<VertexId> rooted_isomorphism(const Lattice& from, const Lattice& to) {
  if (from.size() != to.size()) throw Error("rotation systems differ in vertex count");
  std::vector<VertexId> to_order;
  const std::vector<std::int32_t> target = encode(to, 0, 1, &to_order);
  for (int orientation : {1, -1})
    for (int s = 0; s < kDegree; ++s) {
      std::vector<VertexId> from_order;
      if (encode(from, s, orientation, &from_order) != target) continue;
      std::vector<VertexId> map(from.size(), kNoVertex);
      for (std::size_t i = 0; i < from_order.size(); ++i) map[from_order[i]] = to_order[i];
      return map;
    }
  throw Error("rotation systems are not isomorphic from the root");
}

Lattice with_coordinates(const Lattice& lattice, const Lattice& geometric) {
  const std::vector<VertexId> map = rooted_isomorphism(geometric, lattice);
  std::vector<geom::HPoint> coords(lattice.size());
  for (VertexId g = 0; g < geometric.size(); ++g) coords[map[g]] = geometric.coord(g);
  std::vector<Rotation> rot(lattice.size());
  std::vector<int> depth(lattice.size());
  for (VertexId v = 0; v < lattice.size(); ++v) {
    rot[v] = lattice.rotation(v);
    depth[v] = lattice.depth(v);
  }
  return Lattice(lattice.radius(), lattice.mode(), std::move(rot), std::move(depth), std::move(coords));
}

Lattice build_ball_with_coordinates(int radius) {
  return with_coordinates(build_ball(radius, BuildMode::combinatorial), build_ball(radius, BuildMode::geometric));
}

std::string to_string(BuildMode mode) { return mode == BuildMode::geometric ? "geometric" : "combinatorial"; }

BuildMode parse_build_mode(const std::string& name) {
  if (name == "geometric") return BuildMode::geometric;
  if (name == "combinatorial") return BuildMode::combinatorial;
  throw Error("unknown build mode '" + name + "'");
}

nlohmann::json to_json(const Lattice& lattice) {
  nlohmann::json rot = nlohmann::json::array();
  for (VertexId v = 0; v < lattice.size(); ++v) {
    nlohmann::json row = nlohmann::json::array();
    for (VertexId w : lattice.rotation(v)) {
      if (w == kNoVertex)
        row.push_back(nullptr);
      else
        row.push_back(w);
    }
    rot.push_back(std::move(row));
  }
  nlohmann::json doc = {{"format", "hsaw-lattice"},
                        {"version", 1},
                        {"radius", lattice.radius()},
                        {"mode", to_string(lattice.mode())},
                        {"vertex_count", lattice.size()},
                        {"digest", canonical_digest(lattice)},
                        {"rotation", std::move(rot)}};
  if (lattice.has_coordinates()) {
    nlohmann::json xs = nlohmann::json::array();
    for (const geom::HPoint& p : lattice.coordinates()) xs.push_back({round12(p.x0), round12(p.x1), round12(p.x2)});
    doc["coordinates"] = std::move(xs);
  }
  return doc;
}

Lattice lattice_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "hsaw-lattice" || doc.value("version", 0) != 1)
    throw Error("not an hsaw-lattice v1 document");
  const int radius = doc.at("radius").get<int>();
  const BuildMode mode = parse_build_mode(doc.at("mode").get<std::string>());
  const auto& rows = doc.at("rotation");
  const std::size_t n = rows.size();
  std::vector<Rotation> rot(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (rows[v].size() != kDegree) throw Error("rotation row " + std::to_string(v) + " must have 7 slots");
    for (std::size_t s = 0; s < kDegree; ++s) {
      const auto& cell = rows[v][s];
      rot[v][s] = cell.is_null() ? kNoVertex : cell.get<VertexId>();
      if (rot[v][s] != kNoVertex && rot[v][s] >= n) throw Error("rotation entry out of range");
    }
  }
  for (VertexId v = 0; v < n; ++v)
    for (VertexId w : rot[v]) {
      if (w == kNoVertex) continue;
      if (w == v) throw Error("self-loop at vertex " + std::to_string(v));
      if (std::count(rot[w].begin(), rot[w].end(), v) != 1) throw Error("asymmetric adjacency");
      if (std::count(rot[v].begin(), rot[v].end(), w) != 1) throw Error("parallel edge");
    }

  std::vector<int> depth(n, -1);
  std::vector<VertexId> queue{kRoot};
  depth[kRoot] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (VertexId w : rot[queue[h]])
      if (w != kNoVertex && depth[w] < 0) {
        depth[w] = depth[queue[h]] + 1;
        queue.push_back(w);
      }
  if (std::count(depth.begin(), depth.end(), -1) != 0) throw Error("lattice is disconnected");

  std::optional<std::vector<geom::HPoint>> coords;
  if (doc.contains("coordinates")) {
    const auto& xs = doc.at("coordinates");
    if (xs.size() != n) throw Error("coordinate count mismatch");
    coords.emplace();
    for (const auto& x : xs) coords->push_back({x.at(0).get<double>(), x.at(1).get<double>(), x.at(2).get<double>()});
  }
  return Lattice(radius, mode, std::move(rot), std::move(depth), std::move(coords));
}

}  // namespace hsaw
