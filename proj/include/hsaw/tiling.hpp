#pragma once

// The infinite {3,7} triangulation, addressed arithmetically.
//
// Layer k >= 1 is a cycle. Every layer vertex has one parent (type A) or two
// consecutive parents (type B), and the layer words obey the substitution
//   A -> B A A,   B -> B A
// starting from A^7 on layer 1 (a B child is shared by two consecutive
// parents). Neighbor lists, parents and graph distance are computed from this
// word structure; rows for the first `table_radius` layers are precomputed.

#include <cstdint>
#include <vector>

#include "hsaw/types.hpp"

namespace hsaw {

struct Parents {
  VertexId low = kNoVertex;   // the counterclockwise-earlier parent
  VertexId high = kNoVertex;  // equal to `low` for single-parent vertices
};

class Tiling {
 public:
  explicit Tiling(int table_radius = 12);

  /// Deepest layer whose rotation (children included) is addressable in 64 bits.
  int max_depth() const { return max_depth_; }
  int table_radius() const { return table_radius_; }

  std::uint64_t layer_size(int k) const { return size_[static_cast<std::size_t>(k)]; }
  VertexId layer_offset(int k) const { return offset_[static_cast<std::size_t>(k)]; }
  VertexId vertex(int layer, std::uint64_t index) const;

  bool contains(VertexId v) const { return v < offset_[static_cast<std::size_t>(max_depth_) + 1]; }
  int depth(VertexId v) const;
  std::uint64_t index_in_layer(VertexId v) const { return v - layer_offset(depth(v)); }
  int interior_radius() const { return max_depth_; }

  Rotation rotation(VertexId v) const;
  VertexId neighbor(VertexId v, int slot) const { return rotation(v)[static_cast<std::size_t>(mod7(slot))]; }
  int slot_of(VertexId v, VertexId w) const;
  Parents parents(VertexId v) const;

  /// Exact graph distance via the layer structure (no search).
  int distance(VertexId u, VertexId v) const;

  /// Rotation computed from the substitution only, bypassing the table.
  Rotation rotation_arithmetic(VertexId v) const;
  Parents parents_arithmetic(VertexId v) const;

 private:
  struct Located {
    std::uint64_t parent;  // index in the previous layer
    bool shared;           // type B: also a child of parent - 1
  };
  Located locate(int k, std::uint64_t j) const;
  std::uint64_t count_a_prefix(int k, std::uint64_t j) const;
  void check(VertexId v) const;

  int table_radius_;
  int max_depth_ = 0;
  std::vector<std::uint64_t> size_;
  std::vector<VertexId> offset_;  // offset_[k] = first id of layer k; one extra entry
  // Lengths / A-counts of sigma^m(A) and sigma^m(B).
  std::vector<std::uint64_t> len_a_, len_b_, cnt_a_, cnt_b_;

  std::vector<Rotation> rot_table_;
  std::vector<Parents> parent_table_;
};

}  // namespace hsaw
