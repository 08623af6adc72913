#pragma once

// Verification of the ballisticity argument on Lambda_n: inverse triangle
// inequality events, hull-boundary fractions, the reflection chain of
// probabilities, near-geodesic deviation, and the displacement experiment.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "hsaw/graph.hpp"
#include "hsaw/saw.hpp"

namespace hsaw {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& q);  // "num/den"
double to_double(const Rational& q);

struct ItiConfig {
  int C = 2;
  int delta = 1;
  BoundaryMode boundary = BoundaryMode::tangent;
  HullMode hull = HullMode::one_step;
};

/// dist(g0, gi) + dist(gi, gn) <= dist(g0, gn) + C.
template <RotationGraph G>
bool iti_event(const G& g, const Walk& w, int i, int C) {
  const int n = static_cast<int>(w.size()) - 1;
  if (i <= 0 || i >= n) throw Error("index must satisfy 0 < i < n");
  const VertexId gi = w[static_cast<std::size_t>(i)];
  return g.depth(gi) + g.distance(gi, w.back()) <= g.depth(w.back()) + C;
}

/// |{i in 1..n-1 : A_i}|, skipping the distance oracle where depth bounds decide.
template <RotationGraph G>
int iti_count(const G& g, const Walk& w, int C) {
  const int n = static_cast<int>(w.size()) - 1;
  const int dn = g.depth(w.back());
  int count = 0;
  for (int i = 1; i < n; ++i) {
    const VertexId gi = w[static_cast<std::size_t>(i)];
    const int di = g.depth(gi);
    if (di + (n - i) <= dn + C) {
      ++count;
      continue;
    }
    if (di + std::abs(di - dn) > dn + C) continue;
    if (di + g.distance(gi, w.back()) <= dn + C) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// exact results from the reflection table (n <= 8 in practice)

/// Defect of index i: dist(g0,gi) + dist(gi,gn) - dist(g0,gn), i.e. the
/// smallest C for which A_i holds.
inline int iti_defect(const ReflectionTable& t, std::size_t w, int i) {
  const std::size_t b = w * t.stride();
  return t.depth[b + static_cast<std::size_t>(i)] + t.to_end[b + static_cast<std::size_t>(i)] - t.depth[b + static_cast<std::size_t>(t.n)];
}

/// Same quantity for R_i gamma (the reflection fixes gamma(i) and the prefix).
inline int reflected_defect(const ReflectionTable& t, std::size_t w, int i) {
  const std::size_t b = w * t.stride();
  return t.depth[b + static_cast<std::size_t>(i)] + t.to_end[b + static_cast<std::size_t>(i)] -
         t.image_disp[w * static_cast<std::size_t>(t.n - 1) + static_cast<std::size_t>(i) - 1];
}

inline bool on_boundary(const ReflectionTable& t, std::size_t w, int j, BoundaryMode mode) {
  const std::size_t b = w * t.stride() + static_cast<std::size_t>(j);
  return mode == BoundaryMode::tangent ? t.slot[b] >= 0 : t.exposed[b] != 0;
}

struct ChainResult {
  int n = 0, i = 0, C = 0;
  BoundaryMode boundary = BoundaryMode::tangent;
  Rational p_iti;        // P(A_i)
  Rational p_reflected;  // P(R_i gamma in A_i)
  Rational p_boundary;   // P(gamma(i) on the boundary)
  bool first_holds = false;   // 7 P(A_i) >= P(R_i gamma in A_i)
  bool second_holds = false;  // P(R_i gamma in A_i) >= P(gamma(i) on the boundary)
};

ChainResult inequality_chain(const ReflectionTable& t, int i, int C, BoundaryMode mode = BoundaryMode::tangent);

struct Calibration {
  int c_min = 1, c_max = 8;
  std::optional<int> c_star;                // smallest C in range with no acting defect
  int max_reflected_defect = 0;             // over acting pairs
  std::uint64_t acting_pairs = 0;           // (gamma, i) where R_i acts
  std::map<int, std::uint64_t> defect_histogram;  // reflected defect -> acting pairs
};

/// Smallest C in [c_min, c_max] such that every (gamma, i) where R_i acts has
/// R_i gamma in A_i.
Calibration calibrate(const ReflectionTable& t, int c_min = 1, int c_max = 8);

struct ChainDefects {
  int C = 0;
  std::uint64_t defect_pairs = 0;     // gamma(i) tangent, R_i gamma not in A_i
  std::uint64_t walks_with_defect = 0;
  std::uint64_t per_walk_violations = 0;  // walks with #A_i < #acting - #defects
};

ChainDefects chain_defects(const ReflectionTable& t, int C);

/// Fraction of (gamma, i), i in 1..n-1, with A_i.
Rational iti_fraction(const ReflectionTable& t, int C);

struct FractionSummary {
  Rational min, mean;
  std::map<Rational, std::uint64_t> distribution;  // fraction -> walks
};

/// |A ∩ boundary| / |A| over all walks, A the walk's vertex set.
FractionSummary boundary_fraction(const ReflectionTable& t, BoundaryMode mode);

struct InvolutionCheck {
  std::uint64_t acting = 0;      // (gamma, i) where R_i acts
  std::uint64_t returned = 0;    // R_i R_i gamma = gamma
  std::uint64_t same_mirror = 0; // R_i gamma uses the same mirror again
  std::uint64_t same_mirror_returned = 0;
};

InvolutionCheck involution_check(const ReflectionTable& t);

// ---------------------------------------------------------------------------
// exact moments by enumeration (n <= 12)

struct ExactMoments {
  int n = 0, C = 0;
  std::uint64_t walks = 0;
  std::uint64_t sum_disp = 0, sum_disp2 = 0;
  std::uint64_t sum_iti = 0, sum_iti2 = 0;

  Rational mean_disp() const { return Rational(sum_disp, walks); }
  Rational mean_iti() const { return Rational(sum_iti, walks); }
};

template <RotationGraph G>
ExactMoments exact_moments(const G& g, int n, int C) {
  ExactMoments init;
  init.n = n;
  init.C = C;
  auto visit = [&g, C](ExactMoments& m, const Walk& w) {
    const std::uint64_t d = static_cast<std::uint64_t>(g.depth(w.back()));
    const std::uint64_t k = static_cast<std::uint64_t>(iti_count(g, w, C));
    ++m.walks;
    m.sum_disp += d;
    m.sum_disp2 += d * d;
    m.sum_iti += k;
    m.sum_iti2 += k * k;
  };
  auto merge = [](ExactMoments& a, ExactMoments&& b) {
    a.walks += b.walks;
    a.sum_disp += b.sum_disp;
    a.sum_disp2 += b.sum_disp2;
    a.sum_iti += b.sum_iti;
    a.sum_iti2 += b.sum_iti2;
  };
  return fold_walks(g, n, init, visit, merge);
}

// ---------------------------------------------------------------------------
// near-geodesic deviation

struct NearGeodesicReport {
  int C = 0;
  int rho = 0;                     // max dist(gamma(i), I(gamma(0), gamma(n))) over A_i
  Walk witness;
  int witness_index = -1;
  double tube_constant = 0.0;      // max |N_rho(I)| / dist(gamma(0), gamma(n))
  std::uint64_t pairs = 0;         // (gamma, i) with A_i examined
};

/// Deviation of A_i-vertices from the geodesic interval between the walk's ends.
template <RotationGraph G>
NearGeodesicReport near_geodesic_audit(const G& g, const std::vector<Walk>& walks, int C);

/// Exhaustive version over Lambda_n.
template <RotationGraph G>
NearGeodesicReport near_geodesic_audit(const G& g, int n, int C);

// ---------------------------------------------------------------------------
// sampled ensembles

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // batch-means standard error
  double min = 0.0;
  double max = 0.0;
  std::uint64_t count = 0;
};

/// Mean and batch-means standard error of a correlated series.
Estimate estimate(const std::vector<double>& series, int batches = 50);

struct HullSample {
  double tangent = 0.0;  // |A ∩ tangent boundary| / |A|
  double exposed = 0.0;
  double shell = 0.0;    // |A ∩ shell(d)| / |A|
};

template <RotationGraph G>
HullSample hull_fractions(const G& g, const Walk& w, HullMode mode, int shell_d) {
  HullOptions opt{mode, BoundaryScope::source};
  const HullReport r = convex_hull(g, VertexSet(w.begin(), w.end()), opt);
  const VertexSet shell = hull_shell(g, r, shell_d);
  const double a = static_cast<double>(r.source.size());
  const auto frac = [&](const VertexSet& b) {
    std::size_t c = 0;
    for (VertexId x : r.source) c += member(b, x);
    return static_cast<double>(c) / a;
  };
  return {frac(r.tangent), frac(r.exposed), frac(shell)};
}

struct PivotConfig {
  std::uint64_t samples = 100000;
  std::uint64_t burn_in_per_step = 100;  // burn-in = this * n proposals
  std::uint64_t thin_per_step = 1;       // proposals between samples = this * n
  MoveSet moves = MoveSet::dihedral;
  std::uint64_t hull_samples = 0;        // walks (evenly spaced) that get hull fractions
  int shell_d = 1;
  HullMode hull = HullMode::one_step;
};

struct PivotRow {
  int n = 0;
  std::uint64_t seed = 0;
  double acceptance = 0.0;
  Estimate displacement;
  Estimate iti;  // |{i : A_i}|
  Estimate tangent_fraction, exposed_fraction, shell_fraction;
};

/// One chain per n, stream n of `seed`.
template <RotationGraph G>
PivotRow pivot_row(const G& g, int n, int C, std::uint64_t seed, const PivotConfig& cfg);

// ---------------------------------------------------------------------------
// ballisticity

struct BallisticRow {
  int n = 0;
  bool exact = false;
  std::string samples;          // "exact" or a count
  double mean_disp = 0.0;
  double se_disp = 0.0;
  double mean_iti = 0.0;
  double se_iti = 0.0;
  std::string exact_mean_disp;  // rational, exact rows only
  std::string exact_mean_iti;
  double acceptance = 0.0;      // pivot rows
};

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
  double slope_se = 0.0;          // from residuals
  double slope_se_sampling = 0.0; // propagated from per-n standard errors
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& se);

struct BallisticReport {
  int C = 0;
  std::vector<BallisticRow> rows;
  LinearFit fit;
  double min_disp_ratio = 0.0;  // min mean_disp / n
  double min_iti_ratio = 0.0;   // min mean_iti / n
};

BallisticReport make_ballistic_report(int C, std::vector<BallisticRow> rows);

// ---------------------------------------------------------------------------
// distributions

/// Total-variation distance between the empirical law of `codes` and the
/// uniform law on `support` (sorted) walks.
double tv_to_uniform(std::vector<WalkCode> codes, const std::vector<WalkCode>& support);

/// Expected TV of that statistic for exact uniform samples (normal approximation).
double tv_null_expectation(std::uint64_t support, std::uint64_t samples);

/// Pearson chi-square of category counts against uniform; returns (statistic, dof).
std::pair<double, double> chi_square_uniform(const std::vector<std::uint64_t>& counts);

// ---------------------------------------------------------------------------
// rendering

struct RenderOptions {
  int size = 800;               // pixels
  int lattice_radius = -1;      // draw lattice edges up to this depth (-1: whole ball)
};

/// Poincare-disk SVG: lattice in light gray, walk in green, optional mirror in
/// orange, optional reflected suffix dashed. Requires coordinates.
std::string render_walk(const Lattice& l, const Walk& w, std::optional<int> index = std::nullopt,
                        std::optional<Automorphism> mirror = std::nullopt, const RenderOptions& opt = {});


// ---------------------------------------------------------------------------
// template definitions

namespace detail {

struct NearGeodesicAcc {
  int rho = 0;
  Walk witness;
  int witness_index = -1;
  std::uint64_t pairs = 0;
  VertexSet endpoints;
};

template <RotationGraph G>
void near_geodesic_visit(const G& g, const Walk& w, int C, NearGeodesicAcc& acc) {
  const int n = static_cast<int>(w.size()) - 1;
  if (n < 2) return;
  const VertexId end = w.back();
  const int dn = g.depth(end);
  acc.endpoints.push_back(end);
  std::optional<VertexSet> iv;
  for (int i = 1; i < n; ++i) {
    const VertexId gi = w[static_cast<std::size_t>(i)];
    if (g.depth(gi) + g.distance(gi, end) > dn + C) continue;
    ++acc.pairs;
    if (!iv) iv = interval(g, kRoot, end);
    int dev = std::numeric_limits<int>::max();
    for (VertexId s : *iv) dev = std::min(dev, g.distance(gi, s));
    if (dev > acc.rho || acc.witness_index < 0) {
      acc.rho = std::max(acc.rho, dev);
      acc.witness = w;
      acc.witness_index = i;
    }
  }
}

template <RotationGraph G>
NearGeodesicReport finish_near_geodesic(const G& g, NearGeodesicAcc acc, int C) {
  NearGeodesicReport r;
  r.C = C;
  r.rho = acc.rho;
  r.witness = std::move(acc.witness);
  r.witness_index = acc.witness_index;
  r.pairs = acc.pairs;
  normalize(acc.endpoints);
  for (VertexId end : acc.endpoints) {
    const int d = g.depth(end);
    if (d == 0) continue;
    const VertexSet iv = interval(g, kRoot, end);
    VertexSet tube = iv, frontier = iv, next;
    for (int t = 0; t < acc.rho; ++t) {
      next.clear();
      for (VertexId y : frontier)
        for (VertexId z : g.rotation(y))
          if (z != kNoVertex) next.push_back(z);
      normalize(next);
      VertexSet fresh;
      std::set_difference(next.begin(), next.end(), tube.begin(), tube.end(), std::back_inserter(fresh));
      tube.insert(tube.end(), fresh.begin(), fresh.end());
      normalize(tube);
      frontier.swap(fresh);
    }
    r.tube_constant = std::max(r.tube_constant, static_cast<double>(tube.size()) / d);
  }
  return r;
}

}  // namespace detail

template <RotationGraph G>
NearGeodesicReport near_geodesic_audit(const G& g, const std::vector<Walk>& walks, int C) {
  detail::NearGeodesicAcc acc;
  for (const Walk& w : walks) detail::near_geodesic_visit(g, w, C, acc);
  return detail::finish_near_geodesic(g, std::move(acc), C);
}

template <RotationGraph G>
NearGeodesicReport near_geodesic_audit(const G& g, int n, int C) {
  auto visit = [&g, C](detail::NearGeodesicAcc& a, const Walk& w) { detail::near_geodesic_visit(g, w, C, a); };
  auto merge = [](detail::NearGeodesicAcc& a, detail::NearGeodesicAcc&& b) {
    if (b.rho > a.rho || (a.witness_index < 0 && b.witness_index >= 0)) {
      a.rho = b.rho;
      a.witness = std::move(b.witness);
      a.witness_index = b.witness_index;
    }
    a.pairs += b.pairs;
    normalize(b.endpoints);
    a.endpoints.insert(a.endpoints.end(), b.endpoints.begin(), b.endpoints.end());
    normalize(a.endpoints);
  };
  return detail::finish_near_geodesic(g, fold_walks(g, n, detail::NearGeodesicAcc{}, visit, merge), C);
}

template <RotationGraph G>
PivotRow pivot_row(const G& g, int n, int C, std::uint64_t seed, const PivotConfig& cfg) {
  PivotChain<G> chain(g, n, seed, cfg.moves, static_cast<std::uint64_t>(n));
  const auto un = static_cast<std::uint64_t>(n);
  chain.run(cfg.burn_in_per_step * un);
  const std::uint64_t thin = std::max<std::uint64_t>(1, cfg.thin_per_step * un);
  const std::uint64_t every = cfg.hull_samples ? std::max<std::uint64_t>(1, cfg.samples / cfg.hull_samples) : 0;
  std::vector<double> disp, iti, tan, exp, shell;
  disp.reserve(cfg.samples);
  iti.reserve(cfg.samples);
  for (std::uint64_t s = 0; s < cfg.samples; ++s) {
    chain.run(thin);
    const Walk& w = chain.walk();
    disp.push_back(g.depth(w.back()));
    iti.push_back(iti_count(g, w, C));
    if (every && s % every == 0 && tan.size() < cfg.hull_samples) {
      const HullSample h = hull_fractions(g, w, cfg.hull, cfg.shell_d);
      tan.push_back(h.tangent);
      exp.push_back(h.exposed);
      shell.push_back(h.shell);
    }
  }
  PivotRow r;
  r.n = n;
  r.seed = seed;
  r.acceptance = chain.acceptance_rate();
  r.displacement = estimate(disp);
  r.iti = estimate(iti);
  if (!tan.empty()) {
    const int b = static_cast<int>(std::min<std::size_t>(20, tan.size()));
    r.tangent_fraction = estimate(tan, b);
    r.exposed_fraction = estimate(exp, b);
    r.shell_fraction = estimate(shell, b);
  }
  return r;
}

}  // namespace hsaw
