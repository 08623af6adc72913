#include "hsaw/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsaw::geom {
namespace {

double form(double a0, double a1, double a2, double b0, double b1, double b2) {
  return -a0 * b0 + a1 * b1 + a2 * b2;
}

using Col = std::array<double, 3>;

double form(const Col& a, const Col& b) { return form(a[0], a[1], a[2], b[0], b[1], b[2]); }

}  // namespace

double mink(const HPoint& p, const HPoint& q) { return form(p.x0, p.x1, p.x2, q.x0, q.x1, q.x2); }
double mink(const Mirror& p, const Mirror& q) { return form(p.n0, p.n1, p.n2, q.n0, q.n1, q.n2); }
double mink(const HPoint& p, const Mirror& q) { return form(p.x0, p.x1, p.x2, q.n0, q.n1, q.n2); }
double mink(const Mirror& p, const HPoint& q) { return mink(q, p); }

double hyp_dist(const HPoint& p, const HPoint& q) {
  const double c = -mink(p, q);
  if (c <= 1.0) return 0.0;  // also absorbs [1 - 1e-12, 1]
  return std::acosh(c);
}

HPoint reflect(const Mirror& m, const HPoint& p) {
  const double s = 2.0 * mink(p, m);
  return {p.x0 - s * m.n0, p.x1 - s * m.n1, p.x2 - s * m.n2};
}

Mirror mirror_through(const HPoint& p, const HPoint& q) {
  // J (p x q) is orthogonal to p and q under the form.
  const double c0 = p.x1 * q.x2 - p.x2 * q.x1;
  const double c1 = p.x2 * q.x0 - p.x0 * q.x2;
  const double c2 = p.x0 * q.x1 - p.x1 * q.x0;
  Mirror m{-c0, c1, c2};
  const double norm = std::sqrt(mink(m, m));
  m.n0 /= norm;
  m.n1 /= norm;
  m.n2 /= norm;
  return m;
}

double edge_length() {
  using std::numbers::pi;
  return 2.0 * std::acosh(std::cos(pi / 3.0) / std::sin(pi / 7.0));
}

TriangleMirrors triangle_mirrors() {
  using std::numbers::pi;
  const double theta = pi / 7.0;
  const double half = edge_length() / 2.0;
  TriangleMirrors t;
  t.edge = {0.0, 0.0, 1.0};
  t.bisector = {0.0, std::sin(theta), -std::cos(theta)};
  t.perpendicular = {-std::sinh(half), -std::cosh(half), 0.0};
  return t;
}

DiskPoint to_disk(const HPoint& p) { return {p.x1 / (1.0 + p.x0), p.x2 / (1.0 + p.x0)}; }

HPoint from_disk(const DiskPoint& d) {
  const double r2 = d.u * d.u + d.v * d.v;
  const double s = 1.0 / (1.0 - r2);
  return {(1.0 + r2) * s, 2.0 * d.u * s, 2.0 * d.v * s};
}

IsomMatrix::IsomMatrix() : a_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

IsomMatrix IsomMatrix::reflection(const Mirror& m) {
  // I - 2 n n^T J
  const std::array<double, 3> n{m.n0, m.n1, m.n2};
  const std::array<double, 3> jn{-m.n0, m.n1, m.n2};
  std::array<double, 9> e{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      e[static_cast<std::size_t>(3 * r + c)] = (r == c ? 1.0 : 0.0) - 2.0 * n[r] * jn[c];
  return IsomMatrix(e);
}

HPoint IsomMatrix::apply(const HPoint& p) const {
  return {a_[0] * p.x0 + a_[1] * p.x1 + a_[2] * p.x2, a_[3] * p.x0 + a_[4] * p.x1 + a_[5] * p.x2,
          a_[6] * p.x0 + a_[7] * p.x1 + a_[8] * p.x2};
}

Mirror IsomMatrix::apply(const Mirror& m) const {
  return {a_[0] * m.n0 + a_[1] * m.n1 + a_[2] * m.n2, a_[3] * m.n0 + a_[4] * m.n1 + a_[5] * m.n2,
          a_[6] * m.n0 + a_[7] * m.n1 + a_[8] * m.n2};
}

IsomMatrix IsomMatrix::operator*(const IsomMatrix& rhs) const {
  std::array<double, 9> e{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(r, k) * rhs(k, c);
      e[static_cast<std::size_t>(3 * r + c)] = s;
    }
  return IsomMatrix(e);
}

IsomMatrix IsomMatrix::lorentz_inverse() const {
  static constexpr std::array<double, 3> j{-1.0, 1.0, 1.0};
  std::array<double, 9> e{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) e[static_cast<std::size_t>(3 * r + c)] = j[r] * (*this)(c, r) * j[c];
  return IsomMatrix(e);
}

double IsomMatrix::form_error() const {
  double err = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const double g = form((*this)(0, r), (*this)(1, r), (*this)(2, r), (*this)(0, c), (*this)(1, c),
                            (*this)(2, c));
      const double want = r == c ? (r == 0 ? -1.0 : 1.0) : 0.0;
      err = std::max(err, std::abs(g - want));
    }
  return err;
}

IsomMatrix renormalize(const IsomMatrix& m) {
  const double err = m.form_error();
  if (!(err <= kMaxFormError))
    throw DriftError("isometry drifted off the Minkowski form (error " + std::to_string(err) +
                     "); rebuild the product from generators");

  Col c0{m(0, 0), m(1, 0), m(2, 0)};
  Col c1{m(0, 1), m(1, 1), m(2, 1)};
  Col c2{m(0, 2), m(1, 2), m(2, 2)};
  if (c0[0] <= 0.0) throw DriftError("isometry does not preserve the upper sheet");

  const auto axpy = [](Col& y, double a, const Col& x) {
    for (int i = 0; i < 3; ++i) y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
  };
  const auto scale = [](Col& y, double a) {
    for (auto& v : y) v *= a;
  };

  scale(c0, 1.0 / std::sqrt(-form(c0, c0)));
  axpy(c1, form(c1, c0), c0);
  scale(c1, 1.0 / std::sqrt(form(c1, c1)));
  axpy(c2, form(c2, c0), c0);
  axpy(c2, -form(c2, c1), c1);
  scale(c2, 1.0 / std::sqrt(form(c2, c2)));

  return IsomMatrix({c0[0], c1[0], c2[0], c0[1], c1[1], c2[1], c0[2], c1[2], c2[2]});
}

}  // namespace hsaw::geom
