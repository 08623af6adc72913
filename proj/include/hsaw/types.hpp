#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsaw {

/// Vertices are numbered layer by layer: the root is 0, layer k occupies a
/// contiguous id range, and ids within a layer follow the layer cycle
/// counterclockwise. Explicit balls and the implicit tiling share this
/// numbering.
using VertexId = std::uint64_t;

inline constexpr VertexId kRoot = 0;
inline constexpr VertexId kNoVertex = ~VertexId{0};
inline constexpr int kDegree = 7;

/// Neighbors in counterclockwise order. Slots keep their angular position
/// even when a rim vertex is missing some neighbors (those hold kNoVertex).
using Rotation = std::array<VertexId, kDegree>;

constexpr int mod7(int s) { return ((s % kDegree) + kDegree) % kDegree; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation needed a vertex outside the built ball.
class BallEscape : public Error {
 public:
  BallEscape(const std::string& what, VertexId v) : Error(what), vertex_(v) {}
  VertexId vertex() const { return vertex_; }

 private:
  VertexId vertex_;
};

}  // namespace hsaw
