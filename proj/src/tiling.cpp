#include "hsaw/tiling.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace hsaw {
namespace {

using u128 = unsigned __int128;

enum Letter : std::uint8_t { kA = 0, kB = 1 };

// sigma(A) = B A A, sigma(B) = B A
constexpr std::array<Letter, 3> kSigmaA{kB, kA, kA};
constexpr std::array<Letter, 2> kSigmaB{kB, kA};

template <class Fn>
void for_each_image_letter(Letter x, Fn&& fn) {
  if (x == kA) {
    for (Letter y : kSigmaA)
      if (!fn(y)) return;
  } else {
    for (Letter y : kSigmaB)
      if (!fn(y)) return;
  }
}

}  // namespace

Tiling::Tiling(int table_radius) : table_radius_(table_radius) {
  if (table_radius < 0) throw std::invalid_argument("table radius must be nonnegative");

  std::vector<u128> sizes{1, 7};
  u128 na = 7, nb = 0;
  const u128 limit = static_cast<u128>(kNoVertex);
  u128 total = 8;
  while (total < limit) {
    const u128 a = 2 * na + nb;
    const u128 b = na + nb;
    na = a;
    nb = b;
    sizes.push_back(na + nb);
    total += na + nb;
  }
  // Layer L is addressable iff every id in it is below kNoVertex.
  u128 off = 0;
  int last = -1;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (off + sizes[k] > limit) break;
    size_.push_back(static_cast<std::uint64_t>(sizes[k]));
    offset_.push_back(static_cast<VertexId>(off));
    off += sizes[k];
    last = static_cast<int>(k);
  }
  offset_.push_back(static_cast<VertexId>(off));
  max_depth_ = last - 1;

  len_a_ = {1};
  len_b_ = {1};
  cnt_a_ = {1};
  cnt_b_ = {0};
  for (int m = 1; m <= last; ++m) {
    const auto p = static_cast<std::size_t>(m - 1);
    len_a_.push_back(len_b_[p] + 2 * len_a_[p]);
    len_b_.push_back(len_b_[p] + len_a_[p]);
    cnt_a_.push_back(cnt_b_[p] + 2 * cnt_a_[p]);
    cnt_b_.push_back(cnt_b_[p] + cnt_a_[p]);
  }

  table_radius_ = std::min(table_radius_, max_depth_);
  const VertexId rows = offset_[static_cast<std::size_t>(table_radius_) + 1];
  rot_table_.resize(rows);
  parent_table_.resize(rows);
  for (VertexId v = 0; v < rows; ++v) {
    rot_table_[v] = rotation_arithmetic(v);
    parent_table_[v] = parents_arithmetic(v);
  }
}

VertexId Tiling::vertex(int layer, std::uint64_t index) const {
  if (layer < 0 || layer > max_depth_ + 1 || index >= layer_size(layer))
    throw std::out_of_range("no vertex (" + std::to_string(layer) + ", " + std::to_string(index) + ")");
  return layer_offset(layer) + index;
}

int Tiling::depth(VertexId v) const {
  const auto it = std::upper_bound(offset_.begin(), offset_.end(), v);
  return static_cast<int>(it - offset_.begin()) - 1;
}

void Tiling::check(VertexId v) const {
  if (!contains(v))
    throw BallEscape("vertex " + std::to_string(v) + " lies beyond the addressable depth " +
                         std::to_string(max_depth_),
                     v);
}

Tiling::Located Tiling::locate(int k, std::uint64_t j) const {
  // k >= 2: W_k is seven copies of sigma^{k-1}(A).
  const auto m = static_cast<std::size_t>(k - 1);
  const std::uint64_t block = j / len_a_[m];
  std::uint64_t r = j % len_a_[m];
  std::uint64_t pos = 0;
  Letter letter = kA;
  for (std::size_t level = m; level > 1; --level) {
    for_each_image_letter(letter, [&](Letter y) {
      const std::uint64_t len = y == kA ? len_a_[level - 1] : len_b_[level - 1];
      if (r < len) {
        letter = y;
        return false;
      }
      r -= len;
      pos += y == kA ? len_a_[level - 2] : len_b_[level - 2];
      return true;
    });
  }
  return {block * len_a_[m - 1] + pos, r == 0};
}

std::uint64_t Tiling::count_a_prefix(int k, std::uint64_t j) const {
  if (k == 1) return j;
  const auto m = static_cast<std::size_t>(k - 1);
  std::uint64_t acc = (j / len_a_[m]) * cnt_a_[m];
  std::uint64_t r = j % len_a_[m];
  Letter letter = kA;
  for (std::size_t level = m; level > 0 && r > 0; --level) {
    for_each_image_letter(letter, [&](Letter y) {
      const std::uint64_t len = y == kA ? len_a_[level - 1] : len_b_[level - 1];
      if (r < len) {
        letter = y;
        return false;
      }
      r -= len;
      acc += y == kA ? cnt_a_[level - 1] : cnt_b_[level - 1];
      return true;
    });
  }
  return acc;
}

Parents Tiling::parents_arithmetic(VertexId v) const {
  check(v);
  const int k = depth(v);
  if (k == 0) return {};
  if (k == 1) return {kRoot, kRoot};
  const std::uint64_t j = v - layer_offset(k);
  const Located loc = locate(k, j);
  const std::uint64_t np = layer_size(k - 1);
  const VertexId high = vertex(k - 1, loc.parent);
  if (!loc.shared) return {high, high};
  return {vertex(k - 1, (loc.parent + np - 1) % np), high};
}

Rotation Tiling::rotation_arithmetic(VertexId v) const {
  check(v);
  Rotation rot{};
  const int k = depth(v);
  if (k == 0) {
    for (int s = 0; s < kDegree; ++s) rot[static_cast<std::size_t>(s)] = vertex(1, static_cast<std::uint64_t>(s));
    return rot;
  }
  const std::uint64_t j = v - layer_offset(k);
  const std::uint64_t n = layer_size(k);
  const std::uint64_t nc = layer_size(k + 1);
  const Parents par = parents_arithmetic(v);
  const bool shared = par.low != par.high;
  const std::uint64_t start = 2 * j + count_a_prefix(k, j);
  const auto child = [&](std::uint64_t c) { return vertex(k + 1, (start + c) % nc); };
  const VertexId prev = vertex(k, (j + n - 1) % n);
  const VertexId next = vertex(k, (j + 1) % n);
  if (!shared) {
    rot = {par.low, prev, child(0), child(1), child(2), child(3), next};
  } else {
    rot = {par.low, prev, child(0), child(1), child(2), next, par.high};
  }
  return rot;
}

Rotation Tiling::rotation(VertexId v) const {
  if (v < rot_table_.size()) return rot_table_[v];
  return rotation_arithmetic(v);
}

Parents Tiling::parents(VertexId v) const {
  if (v < parent_table_.size()) return parent_table_[v];
  return parents_arithmetic(v);
}

int Tiling::slot_of(VertexId v, VertexId w) const {
  const Rotation rot = rotation(v);
  for (int s = 0; s < kDegree; ++s)
    if (rot[static_cast<std::size_t>(s)] == w) return s;
  return -1;
}

int Tiling::distance(VertexId u, VertexId v) const {
  if (u == v) return 0;
  check(u);
  check(v);

  // Arcs of geodesic ancestors on a layer: [lo, lo + len) cyclically.
  struct Arc {
    std::uint64_t lo;
    std::uint64_t len;
  };
  const auto descend = [this](int k, Arc a) -> Arc {
    if (k == 1) return {0, 1};
    const std::uint64_t n = layer_size(k);
    const std::uint64_t np = layer_size(k - 1);
    const std::uint64_t hi = (a.lo + a.len - 1) % n;
    const VertexId off = layer_offset(k);
    const VertexId poff = layer_offset(k - 1);
    const std::uint64_t lo2 = parents(off + a.lo).low - poff;
    const std::uint64_t hi2 = parents(off + hi).high - poff;
    const std::uint64_t len2 = (hi2 + np - lo2) % np + 1;
    if (2 * len2 > np && np > 7) throw std::logic_error("ancestor arc wider than half a layer");
    return {lo2, len2};
  };
  const auto gap = [this](int k, Arc a, Arc b) -> std::uint64_t {
    const std::uint64_t n = layer_size(k);
    if ((b.lo + n - a.lo) % n < a.len || (a.lo + n - b.lo) % n < b.len) return 0;
    const std::uint64_t ahi = (a.lo + a.len - 1) % n;
    const std::uint64_t bhi = (b.lo + b.len - 1) % n;
    return std::min((b.lo + n - ahi) % n, (a.lo + n - bhi) % n);
  };

  int ku = depth(u);
  int kv = depth(v);
  Arc au{u - layer_offset(ku), 1};
  Arc av{v - layer_offset(kv), 1};
  std::uint64_t base = 0;
  for (; ku > kv; --ku, ++base) au = descend(ku, au);
  for (; kv > ku; --kv, ++base) av = descend(kv, av);

  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (int k = ku;; --k) {
    const std::uint64_t g = gap(k, au, av);
    best = std::min(best, base + g);
    if (g == 0 || k == 0 || base + 2 >= best) break;
    au = descend(k, au);
    av = descend(k, av);
    base += 2;
  }
  return static_cast<int>(best);
}

}  // namespace hsaw
