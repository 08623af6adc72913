#pragma once

// Finite balls of the 7-regular triangulation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsaw/geom.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

enum class BuildMode { geometric, combinatorial };

inline constexpr int kMaxBallRadius = 25;
// Memory guard: about 56 bytes of rotation data per vertex.
inline constexpr std::size_t kMaxBallVertices = 12'000'000;

class Lattice {
 public:
  Lattice(int radius, BuildMode mode, std::vector<Rotation> rot, std::vector<int> depth,
          std::optional<std::vector<geom::HPoint>> coords = std::nullopt);

  int radius() const { return radius_; }
  int interior_radius() const { return radius_ - 1; }
  BuildMode mode() const { return mode_; }
  std::size_t size() const { return rot_.size(); }

  bool contains(VertexId v) const { return v < rot_.size(); }
  const Rotation& rotation(VertexId v) const { return rot_[v]; }
  VertexId neighbor(VertexId v, int slot) const { return rot_[v][static_cast<std::size_t>(mod7(slot))]; }
  int slot_of(VertexId v, VertexId w) const;
  int degree(VertexId v) const;
  bool full(VertexId v) const { return degree(v) == kDegree; }
  int depth(VertexId v) const { return depth_[v]; }

  /// Breadth-first distances from `src` inside the ball (-1: unreachable).
  std::vector<int> bfs(VertexId src) const;
  int distance(VertexId u, VertexId v) const;

  bool has_coordinates() const { return coords_.has_value(); }
  const geom::HPoint& coord(VertexId v) const;
  const std::vector<geom::HPoint>& coordinates() const;

 private:
  int radius_;
  BuildMode mode_;
  std::vector<Rotation> rot_;
  std::vector<int> depth_;
  std::optional<std::vector<geom::HPoint>> coords_;
};

/// Ball of graph radius R around the root.
///
/// combinatorial: layer-by-layer growth from the degree-7 triangulation rule;
///   ids follow the layered numbering shared with Tiling.
/// geometric: orbit of the basepoint under the (2,3,7) reflection group,
///   deduplicated in the disk chart; ids in discovery order, coordinates kept.
Lattice build_ball(int radius, BuildMode mode);

std::vector<std::size_t> layer_sizes(const Lattice& lattice);

/// Hash of the rotation system after canonical breadth-first relabeling
/// from the root (minimum over the 14 root flags). Label independent.
std::string canonical_digest(const Lattice& lattice);

/// Map from `from` ids to `to` ids preserving root, slots and orientation.
/// Throws hsaw::Error if the two rotation systems differ.
std::vector<VertexId> rooted_isomorphism(const Lattice& from, const Lattice& to);

/// Copy of `lattice` carrying the coordinates of an isomorphic geometric ball.
Lattice with_coordinates(const Lattice& lattice, const Lattice& geometric);

/// Combinatorial ball with coordinates transferred from the geometric build.
Lattice build_ball_with_coordinates(int radius);

nlohmann::json to_json(const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& doc);

std::string to_string(BuildMode mode);
BuildMode parse_build_mode(const std::string& name);

}  // namespace hsaw
