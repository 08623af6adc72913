#pragma once

// Hyperboloid model of the hyperbolic plane, signature (-,+,+).
//
// Points live on the upper sheet <p,p> = -1, x0 >= 1. Geodesic lines are
// represented by unit spacelike normals <n,n> = +1; the reflection in a line
// is the linear map p -> p - 2<p,n> n. The Poincare disk is only used as a
// bounded chart (deduplication and drawing).

#include <array>
#include <stdexcept>
#include <string>

namespace hsaw::geom {

inline constexpr double kInvariantTol = 1e-9;
inline constexpr double kDedupTol = 1e-6;
inline constexpr double kMaxFormError = 1e-3;

struct HPoint {
  double x0 = 1.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

struct Mirror {
  double n0 = 0.0;
  double n1 = 1.0;
  double n2 = 0.0;
};

struct DiskPoint {
  double u = 0.0;
  double v = 0.0;
};

class DriftError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double mink(const HPoint& p, const HPoint& q);
double mink(const Mirror& p, const Mirror& q);
double mink(const HPoint& p, const Mirror& q);
double mink(const Mirror& p, const HPoint& q);

/// arccosh(-<p,q>), with arguments in [1 - 1e-12, 1] treated as 0.
double hyp_dist(const HPoint& p, const HPoint& q);

HPoint reflect(const Mirror& m, const HPoint& p);

/// Line through two distinct points (normalized Lorentz cross product).
Mirror mirror_through(const HPoint& p, const HPoint& q);

/// Mirrors of the (2,3,7) fundamental triangle. The pi/7 corner sits at the
/// basepoint (1,0,0); normals point into the triangle so that
/// <n_i,n_j> = -cos(angle between the two mirrors).
struct TriangleMirrors {
  Mirror edge;           // contains the lattice edge leaving the basepoint
  Mirror bisector;       // pi/7 with `edge`, pi/3 with `perpendicular`
  Mirror perpendicular;  // perpendicular bisector of that edge, pi/2 with `edge`
};

TriangleMirrors triangle_mirrors();

/// Length of a lattice edge: 2 arccosh(cos(pi/3) / sin(pi/7)).
double edge_length();

DiskPoint to_disk(const HPoint& p);
HPoint from_disk(const DiskPoint& d);

/// 3x3 real matrix acting on hyperboloid coordinates, row-major.
class IsomMatrix {
 public:
  IsomMatrix();  // identity
  explicit IsomMatrix(const std::array<double, 9>& entries) : a_(entries) {}

  static IsomMatrix identity() { return IsomMatrix(); }
  static IsomMatrix reflection(const Mirror& m);

  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(3 * r + c)]; }
  const std::array<double, 9>& entries() const { return a_; }

  HPoint apply(const HPoint& p) const;
  Mirror apply(const Mirror& m) const;
  IsomMatrix operator*(const IsomMatrix& rhs) const;

  /// Inverse of a form-preserving matrix: J M^T J.
  IsomMatrix lorentz_inverse() const;

  /// max |M^T J M - J| entrywise.
  double form_error() const;

 private:
  std::array<double, 9> a_;
};

/// Minkowski Gram-Schmidt on the columns. Throws DriftError when the input
/// form error exceeds kMaxFormError; the caller should rebuild the product
/// from generators in that case.
IsomMatrix renormalize(const IsomMatrix& m);

}  // namespace hsaw::geom
