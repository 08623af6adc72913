#include "hsaw/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hsaw {

std::string to_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

namespace {

std::size_t image_index(const ReflectionTable& t, std::size_t w, int i) {
  return w * static_cast<std::size_t>(t.n - 1) + static_cast<std::size_t>(i) - 1;
}

void check_index(const ReflectionTable& t, int i) {
  if (i < 1 || i >= t.n) throw Error("index must satisfy 0 < i < n");
}

}  // namespace

ChainResult inequality_chain(const ReflectionTable& t, int i, int C, BoundaryMode mode) {
  check_index(t, i);
  std::uint64_t iti = 0, refl = 0, bd = 0;
  for (std::size_t w = 0; w < t.size(); ++w) {
    iti += iti_defect(t, w, i) <= C;
    refl += reflected_defect(t, w, i) <= C;
    bd += on_boundary(t, w, i, mode);
  }
  ChainResult r;
  r.n = t.n;
  r.i = i;
  r.C = C;
  r.boundary = mode;
  const auto total = static_cast<std::uint64_t>(t.size());
  r.p_iti = Rational(iti, total);
  r.p_reflected = Rational(refl, total);
  r.p_boundary = Rational(bd, total);
  r.first_holds = 7 * r.p_iti >= r.p_reflected;
  r.second_holds = r.p_reflected >= r.p_boundary;
  return r;
}

Calibration calibrate(const ReflectionTable& t, int c_min, int c_max) {
  Calibration c;
  c.c_min = c_min;
  c.c_max = c_max;
  for (std::size_t w = 0; w < t.size(); ++w)
    for (int i = 1; i < t.n; ++i) {
      if (t.slot[w * t.stride() + static_cast<std::size_t>(i)] < 0) continue;
      const int d = reflected_defect(t, w, i);
      ++c.acting_pairs;
      ++c.defect_histogram[d];
      c.max_reflected_defect = std::max(c.max_reflected_defect, d);
    }
  for (int C = c_min; C <= c_max; ++C)
    if (C >= c.max_reflected_defect) {
      c.c_star = C;
      break;
    }
  return c;
}

ChainDefects chain_defects(const ReflectionTable& t, int C) {
  ChainDefects r;
  r.C = C;
  for (std::size_t w = 0; w < t.size(); ++w) {
    int acting = 0, defects = 0, iti = 0;
    for (int i = 1; i < t.n; ++i) {
      iti += iti_defect(t, w, i) <= C;
      if (t.slot[w * t.stride() + static_cast<std::size_t>(i)] < 0) continue;
      ++acting;
      defects += reflected_defect(t, w, i) > C;
    }
    r.defect_pairs += static_cast<std::uint64_t>(defects);
    r.walks_with_defect += defects > 0;
    r.per_walk_violations += iti < acting - defects;
  }
  return r;
}

Rational iti_fraction(const ReflectionTable& t, int C) {
  std::uint64_t hit = 0;
  for (std::size_t w = 0; w < t.size(); ++w)
    for (int i = 1; i < t.n; ++i) hit += iti_defect(t, w, i) <= C;
  return Rational(hit, static_cast<std::uint64_t>(t.size()) * static_cast<std::uint64_t>(t.n - 1));
}

FractionSummary boundary_fraction(const ReflectionTable& t, BoundaryMode mode) {
  FractionSummary f;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_count(t.stride() + 1, 0);
  for (std::size_t w = 0; w < t.size(); ++w) {
    std::uint64_t c = 0;
    for (int j = 0; j <= t.n; ++j) c += on_boundary(t, w, j, mode);
    ++per_count[c];
    total += c;
  }
  const auto a = static_cast<std::uint64_t>(t.stride());
  f.mean = Rational(total, static_cast<std::uint64_t>(t.size()) * a);
  bool first = true;
  for (std::size_t c = 0; c < per_count.size(); ++c) {
    if (!per_count[c]) continue;
    const Rational q(static_cast<std::uint64_t>(c), a);
    f.distribution[q] = per_count[c];
    if (first) f.min = q;
    first = false;
  }
  return f;
}

InvolutionCheck involution_check(const ReflectionTable& t) {
  InvolutionCheck r;
  for (std::size_t w = 0; w < t.size(); ++w)
    for (int i = 1; i < t.n; ++i) {
      const int k = t.slot[w * t.stride() + static_cast<std::size_t>(i)];
      if (k < 0) continue;
      ++r.acting;
      const WalkCode img = t.image[image_index(t, w, i)];
      const auto it = std::lower_bound(t.code.begin(), t.code.end(), img);
      if (it == t.code.end() || *it != img) throw std::logic_error("reflected walk missing from the table");
      const auto v = static_cast<std::size_t>(it - t.code.begin());
      const bool back = t.image[image_index(t, v, i)] == t.code[w];
      const bool same = t.slot[v * t.stride() + static_cast<std::size_t>(i)] == k;
      r.returned += back;
      r.same_mirror += same;
      r.same_mirror_returned += same && back;
    }
  return r;
}

Estimate estimate(const std::vector<double>& series, int batches) {
  Estimate e;
  e.count = series.size();
  if (series.empty()) return e;
  e.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  e.min = *lo;
  e.max = *hi;
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 2)), series.size());
  if (b < 2) return e;
  const std::size_t len = series.size() / b;
  std::vector<double> means(b, 0.0);
  for (std::size_t q = 0; q < b; ++q) {
    for (std::size_t k = 0; k < len; ++k) means[q] += series[q * len + k];
    means[q] /= static_cast<double>(len);
  }
  const double mm = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
  double ss = 0.0;
  for (double m : means) ss += (m - mm) * (m - mm);
  e.se = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
  return e;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& se) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw Error("line fit needs at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (m > 2) {
    double rss = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double r = y[k] - f.intercept - f.slope * x[k];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  }
  double var = 0;
  for (std::size_t k = 0; k < se.size() && k < m; ++k) {
    const double c = (x[k] - mx) / sxx;
    var += c * c * se[k] * se[k];
  }
  f.slope_se_sampling = std::sqrt(var);
  return f;
}

BallisticReport make_ballistic_report(int C, std::vector<BallisticRow> rows) {
  BallisticReport r;
  r.C = C;
  r.rows = std::move(rows);
  std::vector<double> x, y, se;
  r.min_disp_ratio = std::numeric_limits<double>::infinity();
  r.min_iti_ratio = std::numeric_limits<double>::infinity();
  for (const BallisticRow& row : r.rows) {
    x.push_back(row.n);
    y.push_back(row.mean_disp);
    se.push_back(row.se_disp);
    r.min_disp_ratio = std::min(r.min_disp_ratio, row.mean_disp / row.n);
    if (row.n >= 2) r.min_iti_ratio = std::min(r.min_iti_ratio, row.mean_iti / row.n);
  }
  if (r.rows.size() >= 2) r.fit = fit_line(x, y, se);
  return r;
}

double tv_to_uniform(std::vector<WalkCode> codes, const std::vector<WalkCode>& support) {
  if (codes.empty() || support.empty()) throw Error("total variation needs samples and a support");
  std::sort(codes.begin(), codes.end());
  const double n = static_cast<double>(codes.size());
  const double p = 1.0 / static_cast<double>(support.size());
  double tv = 0.0;
  std::size_t a = 0;
  std::uint64_t inside = 0;
  for (WalkCode s : support) {
    while (a < codes.size() && codes[a] < s) ++a;
    std::size_t b = a;
    while (b < codes.size() && codes[b] == s) ++b;
    tv += std::abs(static_cast<double>(b - a) / n - p);
    inside += b - a;
    a = b;
  }
  tv += static_cast<double>(codes.size() - inside) / n;
  return 0.5 * tv;
}

double tv_null_expectation(std::uint64_t support, std::uint64_t samples) {
  const double m = static_cast<double>(support), n = static_cast<double>(samples);
  const double p = 1.0 / m;
  return 0.5 * m * std::sqrt(2.0 * p * (1.0 - p) / (std::numbers::pi * n));
}

std::pair<double, double> chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  const double e = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (std::uint64_t c : counts) stat += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
  return {stat, static_cast<double>(counts.size()) - 1.0};
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Canvas {
  double half;
  double scale;
  std::string pt(const geom::HPoint& p) const {
    const geom::DiskPoint d = geom::to_disk(p);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", half + scale * d.u, half - scale * d.v);
    return buf;
  }
};

// Points along the hyperbolic segment p -> q.
std::vector<geom::HPoint> segment(const geom::HPoint& p, const geom::HPoint& q, int pieces) {
  const double d = geom::hyp_dist(p, q);
  std::vector<geom::HPoint> out{p};
  for (int k = 1; k < pieces; ++k) {
    const double t = static_cast<double>(k) / pieces;
    const double a = std::sinh((1 - t) * d) / std::sinh(d), b = std::sinh(t * d) / std::sinh(d);
    out.push_back({a * p.x0 + b * q.x0, a * p.x1 + b * q.x1, a * p.x2 + b * q.x2});
  }
  out.push_back(q);
  return out;
}

std::string arc_path(const Canvas& c, const geom::HPoint& p, const geom::HPoint& q) {
  std::string s;
  const auto pts = segment(p, q, 12);
  for (std::size_t k = 0; k < pts.size(); ++k) s += (k ? " L" : "M") + c.pt(pts[k]);
  return s;
}

// The whole geodesic line through p and q, cut where it gets close to the rim.
std::string line_path(const Canvas& c, const geom::HPoint& p, const geom::HPoint& q) {
  const double d = geom::hyp_dist(p, q);
  // unit tangent at p towards q
  const double ch = std::cosh(d), sh = std::sinh(d);
  const geom::HPoint u{(q.x0 - ch * p.x0) / sh, (q.x1 - ch * p.x1) / sh, (q.x2 - ch * p.x2) / sh};
  std::string s;
  const int steps = 240;
  const double reach = 9.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = -reach + 2 * reach * k / steps;
    const geom::HPoint x{std::cosh(t) * p.x0 + std::sinh(t) * u.x0, std::cosh(t) * p.x1 + std::sinh(t) * u.x1,
                         std::cosh(t) * p.x2 + std::sinh(t) * u.x2};
    s += (k ? " L" : "M") + c.pt(x);
  }
  return s;
}

}  // namespace

std::string render_walk(const Lattice& l, const Walk& w, std::optional<int> index, std::optional<Automorphism> mirror,
                        const RenderOptions& opt) {
  if (!l.has_coordinates()) throw Error("rendering needs lattice coordinates (geometric build)");
  check_walk(l, w);
  const Canvas c{opt.size / 2.0, opt.size / 2.0 - 8.0};
  const int lr = opt.lattice_radius < 0 ? l.radius() : opt.lattice_radius;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.size << "\" height=\"" << opt.size
      << "\" viewBox=\"0 0 " << opt.size << " " << opt.size << "\">\n";
  out << "<circle cx=\"" << c.half << "\" cy=\"" << c.half << "\" r=\"" << c.scale
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";

  std::string grid;
  for (VertexId v = 0; v < l.size(); ++v) {
    if (l.depth(v) > lr) continue;
    for (VertexId x : l.rotation(v))
      if (x != kNoVertex && x > v && l.depth(x) <= lr) grid += arc_path(c, l.coord(v), l.coord(x)) + " ";
  }
  out << "<path class=\"lattice\" d=\"" << grid << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.6\"/>\n";

  Walk reflected;
  if (mirror && index) {
    const Flag a = mirror->anchor();
    if (static_cast<std::size_t>(*index) >= w.size() || w[static_cast<std::size_t>(*index)] != a.vertex)
      throw Error("mirror must fix the walk vertex at the given index");
    const VertexId fixed = l.neighbor(a.vertex, a.slot);
    out << "<path class=\"mirror\" d=\"" << line_path(c, l.coord(a.vertex), l.coord(fixed))
        << "\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
    map_suffix(l, w, static_cast<std::size_t>(*index), a.slot, mirror->image_anchor().slot, mirror->sign(), reflected,
               [](VertexId, std::size_t) { return false; });
  }

  for (std::size_t k = 1; k < w.size(); ++k)
    out << "<path class=\"walk\" d=\"" << arc_path(c, l.coord(w[k - 1]), l.coord(w[k]))
        << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\"/>\n";
  for (std::size_t k = static_cast<std::size_t>(index.value_or(0)) + 1; k < reflected.size(); ++k)
    out << "<path class=\"reflected\" d=\"" << arc_path(c, l.coord(reflected[k - 1]), l.coord(reflected[k]))
        << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\" stroke-dasharray=\"6,4\"/>\n";
  out << "<circle class=\"root\" cx=\"" << c.pt(l.coord(w.front())).substr(0, c.pt(l.coord(w.front())).find(','))
      << "\" cy=\"" << c.pt(l.coord(w.front())).substr(c.pt(l.coord(w.front())).find(',') + 1)
      << "\" r=\"3\" fill=\"black\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace hsaw
