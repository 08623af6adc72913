// hsaw: command-line front end. Every artifact carries a provenance block with
// the resolved options, the seed and the lattice digest; the worker count is
// left out because it never changes results.

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hsaw/analysis.hpp"
#include "hsaw/tiling.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hsaw;

namespace {

constexpr const char* kSchema = "hsaw/1";
constexpr int kDigestRadius = 8;
constexpr std::uint64_t kSampleChunk = 4096;

struct Global {
  std::uint64_t seed = 1;
  std::string out;
  int workers = 0;
};

const Tiling& tiling() {
  static const Tiling t;
  return t;
}

json tiling_info() {
  static const std::string digest = canonical_digest(build_ball(kDigestRadius, BuildMode::combinatorial));
  return {{"kind", "tiling"},
          {"addressable_depth", tiling().max_depth()},
          {"digest", digest},
          {"digest_radius", kDigestRadius}};
}

json options_of(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (o->count()) {
      const std::vector<std::string>& r = o->results();
      std::string v;
      for (std::size_t k = 0; k < r.size(); ++k) v += (k ? "," : "") + r[k];
      cfg[name] = v;
    } else {
      cfg[name] = o->get_default_str();
    }
  }
  return cfg;
}

struct Run {
  Global g;
  std::string command;
  json config;
  fs::path dir;

  json provenance(const json& lattice) const {
    return {{"schema", kSchema}, {"command", command}, {"seed", g.seed}, {"config", config}, {"lattice", lattice}};
  }

  void write(const std::string& name, const std::string& body) const {
    fs::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << body;
    std::cout << (dir / name).string() << "\n";
  }
};

std::string csv_header(const json& prov) { return "# " + prov.dump() + "\n"; }

std::vector<int> parse_range(const std::string& s) {
  // "a:b[:step]" or a comma list
  std::vector<int> out;
  if (s.empty()) return out;
  if (s.find(':') != std::string::npos) {
    std::vector<int> p;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) p.push_back(std::stoi(tok));
    if (p.size() < 2 || p.size() > 3 || (p.size() == 3 && p[2] <= 0)) throw Error("bad range '" + s + "'");
    for (int v = p[0]; v <= p[1]; v += p.size() == 3 ? p[2] : 1) out.push_back(v);
  } else {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

json walk_json(const Walk& w) {
  json a = json::array();
  for (VertexId v : w) a.push_back(v);
  return a;
}

// ---------------------------------------------------------------------------

struct BuildOpts {
  int R = 2;
  std::string mode = "geometric";
};

void cmd_build(const Run& run, const BuildOpts& o) {
  if (o.R < 0) throw Error("R must be >= 0");
  const Lattice l = build_ball(o.R, parse_build_mode(o.mode));
  json lat = to_json(l);
  json info = {{"kind", "ball"}, {"radius", o.R}, {"digest", lat["digest"]}};
  json doc = {{"provenance", run.provenance(info)}, {"lattice", lat}};
  run.write("lattice_R" + std::to_string(o.R) + ".json", doc.dump() + "\n");
  std::cout << "vertices " << l.size() << " digest " << lat["digest"].get<std::string>() << "\n";
}

struct EnumerateOpts {
  int n = 0;
  int prefix_depth = kDefaultPrefixDepth;
};

void cmd_enumerate(const Run& run, const EnumerateOpts& o) {
  const CountVector c = count_walks(tiling(), o.n, o.prefix_depth);
  std::string body = csv_header(run.provenance(tiling_info())) + "n,c_n\n";
  for (int k = 1; k <= o.n; ++k) body += std::to_string(k) + "," + c[static_cast<std::size_t>(k)].str() + "\n";
  run.write("counts_n" + std::to_string(o.n) + ".csv", body);
}

struct SampleOpts {
  int n = 6;
  std::string sampler = "exact";
  std::uint64_t samples = 1000;
  std::uint64_t burn_in = 100;
  std::uint64_t thin = 1;
  std::string moves = "dihedral";
};

void cmd_sample(const Run& run, const SampleOpts& o) {
  std::vector<Walk> walks(o.samples);
  json lat = tiling_info();
  bool experimental = false;
  if (o.sampler == "exact") {
    const ExactSampler<Tiling> s(tiling(), o.n);
    const auto chunks = static_cast<std::int64_t>((o.samples + kSampleChunk - 1) / kSampleChunk);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) {
      Rng rng(run.g.seed, static_cast<std::uint64_t>(c));
      const std::uint64_t a = static_cast<std::uint64_t>(c) * kSampleChunk;
      for (std::uint64_t j = a; j < std::min(o.samples, a + kSampleChunk); ++j) walks[j] = s.sample(rng);
    }
  } else if (o.sampler == "pivot") {
    PivotChain<Tiling> chain(tiling(), o.n, run.g.seed, parse_move_set(o.moves), static_cast<std::uint64_t>(o.n));
    const auto un = static_cast<std::uint64_t>(o.n);
    chain.run(o.burn_in * un);
    for (Walk& w : walks) {
      chain.run(std::max<std::uint64_t>(1, o.thin * un));
      w = chain.walk();
    }
    experimental = o.n > 6;
  } else {
    throw Error("unknown sampler '" + o.sampler + "' (exact|pivot)");
  }
  json prov = run.provenance(lat);
  prov["experimental"] = experimental;
  std::string body = json{{"provenance", prov}}.dump() + "\n";
  for (const Walk& w : walks)
    body += json{{"n", o.n}, {"walk", walk_json(w)}, {"displacement", displacement(tiling(), w)}}.dump() + "\n";
  run.write("samples_" + o.sampler + "_n" + std::to_string(o.n) + ".ndjson", body);
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
  int n = 8;
  int C = -1;
  int R = 10;
  int thinness_R = 4;
  int delta = 1;
  std::string hull = "one-step";
  std::vector<std::string> checks{"dual", "thinness", "closure", "fibers", "chain"};
};

json chain_json(const ChainResult& r) {
  return {{"n", r.n},
          {"i", r.i},
          {"C", r.C},
          {"boundary", to_string(r.boundary)},
          {"p_iti", to_string(r.p_iti)},
          {"p_reflected", to_string(r.p_reflected)},
          {"p_boundary", to_string(r.p_boundary)},
          {"first_holds", r.first_holds},
          {"second_holds", r.second_holds}};
}

json calibration_json(const Calibration& c) {
  json h = json::object();
  for (const auto& [d, k] : c.defect_histogram) h[std::to_string(d)] = k;
  return {{"c_min", c.c_min},
          {"c_max", c.c_max},
          {"c_star", c.c_star ? json(*c.c_star) : json(nullptr)},
          {"max_reflected_defect", c.max_reflected_defect},
          {"acting_pairs", c.acting_pairs},
          {"defect_histogram", h}};
}

bool cmd_verify(const Run& run, const VerifyOpts& o) {
  if (o.n < 2 || o.n > 10) throw Error("verify needs 2 <= n <= 10");
  const auto want = [&](const char* name) { return std::find(o.checks.begin(), o.checks.end(), name) != o.checks.end(); };
  for (const std::string& c : o.checks)
    if (c != "dual" && c != "thinness" && c != "closure" && c != "fibers" && c != "chain")
      throw Error("unknown check '" + c + "'");
  const HullMode hull = parse_hull_mode(o.hull);

  json checks = json::array();
  json failures = json::array();
  const auto record = [&](const std::string& name, bool pass, json detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
    if (!pass) failures.push_back(name);
  };

  if (want("dual")) {
    bool ok = true;
    json rows = json::array();
    for (int r = 1; r <= o.R; ++r) {
      const Lattice a = build_ball(r, BuildMode::combinatorial), b = build_ball(r, BuildMode::geometric);
      const std::string da = canonical_digest(a), db = canonical_digest(b);
      ok = ok && da == db && a.size() == b.size();
      rows.push_back({{"R", r}, {"vertices", a.size()}, {"combinatorial", da}, {"geometric", db}});
    }
    const Lattice big = build_ball(o.R, BuildMode::combinatorial);
    const std::vector<std::size_t> s = layer_sizes(big);
    bool rec = true;
    for (std::size_t k = 2; k + 1 < s.size(); ++k) rec = rec && s[k + 1] == 3 * s[k] - s[k - 1];
    record("dual_construction", ok && rec, {{"digests", rows}, {"layer_sizes", s}, {"recurrence", rec}});
  }
  if (want("thinness")) {
    const Lattice l = build_ball(o.thinness_R + kExcursionMargin + 1, BuildMode::combinatorial);
    const ThinnessReport t = thinness_audit(l, o.thinness_R, o.delta);
    record("thinness", t.pass,
           {{"radius", o.thinness_R},
            {"delta", o.delta},
            {"max_thinness", t.max_thinness},
            {"worst", {t.worst[0], t.worst[1], t.worst[2]}},
            {"triples", t.triples}});
  }

  std::vector<ReflectionTable> tables;
  if (want("closure") || want("fibers") || want("chain"))
    for (int n = 2; n <= o.n; ++n) tables.push_back(reflection_table(tiling(), n, hull));

  if (want("closure")) {
    bool ok = true;
    json rows = json::array();
    for (const ReflectionTable& t : tables) {
      const bool in = images_in_lambda(t);
      ok = ok && in && t.invalid_images == 0 && t.prefix_violations == 0;
      rows.push_back({{"n", t.n},
                      {"walks", t.size()},
                      {"invalid_images", t.invalid_images},
                      {"prefix_violations", t.prefix_violations},
                      {"images_in_lambda", in}});
    }
    record("closure", ok, rows);
  }
  if (want("fibers")) {
    std::uint64_t worst = 0;
    json rows = json::array();
    for (const ReflectionTable& t : tables)
      for (int i = 1; i < t.n; ++i) {
        const auto h = fiber_histogram(t, i);
        json hist = json::object();
        for (const auto& [size, count] : h) hist[std::to_string(size)] = count;
        worst = std::max(worst, h.rbegin()->first);
        rows.push_back({{"n", t.n}, {"i", i}, {"histogram", hist}});
      }
    record("fibers", worst <= 7, {{"max_fiber", worst}, {"bound", 7}, {"rows", rows}});
  }
  if (want("chain")) {
    const Calibration cal = calibrate(tables.back());
    const int C = o.C >= 0 ? o.C : cal.c_star.value_or(cal.c_max);
    bool ok = true;
    json rows = json::array(), defects = json::array();
    for (const ReflectionTable& t : tables) {
      for (int c = C; c <= cal.c_max; ++c)
        for (int i = 1; i < t.n; ++i) {
          const ChainResult r = inequality_chain(t, i, c);
          ok = ok && r.first_holds && r.second_holds;
          rows.push_back(chain_json(r));
        }
      const ChainDefects d = chain_defects(t, C);
      defects.push_back({{"n", t.n},
                         {"C", C},
                         {"defect_pairs", d.defect_pairs},
                         {"walks_with_defect", d.walks_with_defect},
                         {"per_walk_violations", d.per_walk_violations}});
    }
    record("chain", ok, {{"C", C}, {"calibration", calibration_json(cal)}, {"rows", rows}, {"defects", defects}});
  }

  json doc = {{"provenance", run.provenance(tiling_info())}, {"pass", failures.empty()}, {"failures", failures},
              {"checks", checks}};
  run.write("verify_n" + std::to_string(o.n) + ".json", doc.dump(1) + "\n");
  if (!failures.empty()) std::cerr << json{{"failures", failures}}.dump() << "\n";
  return failures.empty();
}

// ---------------------------------------------------------------------------

struct ExperimentOpts {
  int n_exact = 12;
  int n_table = 6;
  std::string pivot_n = "14:40:2";
  std::uint64_t samples = 100000;
  std::uint64_t burn_in = 100;
  std::uint64_t thin = 1;
  std::string moves = "dihedral";
  std::uint64_t hull_samples = 1000;
  int shell_d = 1;
  int C = -1;
  int calibrate_n = 8;
  std::string c_sweep = "1:8";
  std::string hull = "one-step";
  std::string boundary = "tangent";
  double floor_boundary = 0.10;
  double floor_disp = 0.05;
  double floor_iti = 0.10;
  double max_rel_se = 0.20;
};

bool cmd_experiment(const Run& run, const ExperimentOpts& o) {
  if (o.n_table > o.n_exact || o.n_exact > 14 || o.n_table > 9) throw Error("need n-table <= n-exact <= 14, n-table <= 9");
  const HullMode hull = parse_hull_mode(o.hull);
  const BoundaryMode boundary = parse_boundary_mode(o.boundary);
  const std::vector<int> pivot_ns = parse_range(o.pivot_n);
  const std::vector<int> sweep = parse_range(o.c_sweep);
  for (int n : pivot_ns)
    if (n < 2 || n > tiling().max_depth() - kExcursionMargin) throw Error("pivot n out of range");

  json cal_json = nullptr;
  int C = o.C;
  if (C < 0) {
    const Calibration cal = calibrate(reflection_table(tiling(), o.calibrate_n, hull), 1, 8);
    cal_json = calibration_json(cal);
    if (!cal.c_star) throw Error("calibration found no C in 1..8");
    C = *cal.c_star;
  }

  json rows = json::array();
  std::string lemma_csv = "n,i,C,boundary,p_iti,p_reflected,p_boundary,first_holds,second_holds\n";
  std::vector<BallisticRow> ballistic;
  json checks = json::array(), failures = json::array();
  const auto record = [&](const std::string& name, bool pass, json detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
    if (!pass) failures.push_back(name);
  };

  std::string csv =
      "n,mode,samples,C,mean_disp,se_disp,disp_over_n,mean_iti,se_iti,iti_over_n,exact_mean_disp,exact_mean_iti,"
      "acceptance,tangent_fraction,exposed_fraction,shell_fraction,p_iti_mid,p_reflected_mid,p_boundary_mid,rho,"
      "tube_ratio,experimental\n";

  Rational min_tangent = 1;
  for (int n = 1; n <= o.n_exact; ++n) {
    const ExactMoments m = exact_moments(tiling(), n, C);
    BallisticRow b;
    b.n = n;
    b.exact = true;
    b.samples = "exact";
    b.mean_disp = to_double(m.mean_disp());
    b.mean_iti = to_double(m.mean_iti());
    b.exact_mean_disp = to_string(m.mean_disp());
    b.exact_mean_iti = to_string(m.mean_iti());
    ballistic.push_back(b);
    json row = {{"n", n}, {"mode", "exact"}, {"samples", "exact"}, {"walks", m.walks}, {"C", C},
                {"mean_disp", b.exact_mean_disp}, {"disp_over_n", to_string(m.mean_disp() / n)},
                {"mean_iti", b.exact_mean_iti}, {"iti_over_n", to_string(m.mean_iti() / n)}};
    std::string tangent, exposed, pi, pr, pb, rho, tube;
    if (n >= 2 && n <= o.n_table) {
      const ReflectionTable t = reflection_table(tiling(), n, hull);
      const FractionSummary ft = boundary_fraction(t, BoundaryMode::tangent);
      const FractionSummary fe = boundary_fraction(t, BoundaryMode::exposed);
      min_tangent = std::min(min_tangent, ft.min);
      tangent = fmt(to_double(ft.mean));
      exposed = fmt(to_double(fe.mean));
      json chain = json::array();
      for (int i = 1; i < n; ++i) {
        const ChainResult r = inequality_chain(t, i, C, boundary);
        chain.push_back(chain_json(r));
        lemma_csv += std::to_string(n) + "," + std::to_string(i) + "," + std::to_string(C) + "," + to_string(boundary) +
                     "," + to_string(r.p_iti) + "," + to_string(r.p_reflected) + "," + to_string(r.p_boundary) + "," +
                     (r.first_holds ? "1" : "0") + "," + (r.second_holds ? "1" : "0") + "\n";
        if (i == n / 2) {
          pi = to_string(r.p_iti);
          pr = to_string(r.p_reflected);
          pb = to_string(r.p_boundary);
        }
      }
      json iti_by_c = json::object();
      for (int c : sweep) iti_by_c[std::to_string(c)] = to_string(iti_fraction(t, c));
      const NearGeodesicReport ng = near_geodesic_audit(tiling(), n, C);
      rho = std::to_string(ng.rho);
      tube = fmt(ng.tube_constant);
      const ChainDefects d = chain_defects(t, C);
      row["tangent_fraction"] = {{"mean", to_string(ft.mean)}, {"min", to_string(ft.min)}};
      row["exposed_fraction"] = {{"mean", to_string(fe.mean)}, {"min", to_string(fe.min)}};
      row["iti_fraction_by_C"] = iti_by_c;
      row["chain"] = chain;
      row["chain_defects"] = {{"defect_pairs", d.defect_pairs},
                              {"walks_with_defect", d.walks_with_defect},
                              {"per_walk_violations", d.per_walk_violations}};
      row["near_geodesic"] = {{"rho", ng.rho}, {"tube_ratio", ng.tube_constant}, {"witness", walk_json(ng.witness)},
                              {"witness_index", ng.witness_index}};
    }
    rows.push_back(row);
    csv += std::to_string(n) + ",exact,exact," + std::to_string(C) + "," + fmt(b.mean_disp) + ",0," +
           fmt(b.mean_disp / n) + "," + fmt(b.mean_iti) + ",0," + fmt(b.mean_iti / n) + "," + b.exact_mean_disp + "," +
           b.exact_mean_iti + ",," + tangent + "," + exposed + ",," + pi + "," + pr + "," + pb + "," + rho + "," + tube +
           ",0\n";
  }

  PivotConfig pc;
  pc.samples = o.samples;
  pc.burn_in_per_step = o.burn_in;
  pc.thin_per_step = o.thin;
  pc.moves = parse_move_set(o.moves);
  pc.hull_samples = o.hull_samples;
  pc.shell_d = o.shell_d;
  pc.hull = hull;
  std::vector<PivotRow> prow(pivot_ns.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < pivot_ns.size(); ++k) prow[k] = pivot_row(tiling(), pivot_ns[k], C, run.g.seed, pc);

  double min_hull = 1.0;
  for (const PivotRow& p : prow) {
    BallisticRow b;
    b.n = p.n;
    b.samples = std::to_string(o.samples);
    b.mean_disp = p.displacement.mean;
    b.se_disp = p.displacement.se;
    b.mean_iti = p.iti.mean;
    b.se_iti = p.iti.se;
    b.acceptance = p.acceptance;
    ballistic.push_back(b);
    if (o.hull_samples) min_hull = std::min(min_hull, p.tangent_fraction.mean);
    const auto est = [](const Estimate& e) { return json{{"mean", e.mean}, {"se", e.se}, {"count", e.count}}; };
    rows.push_back({{"n", p.n}, {"mode", "pivot"}, {"samples", o.samples}, {"C", C}, {"seed_stream", p.n},
                    {"acceptance", p.acceptance}, {"displacement", est(p.displacement)},
                    {"disp_over_n", p.displacement.mean / p.n}, {"iti", est(p.iti)}, {"iti_over_n", p.iti.mean / p.n},
                    {"tangent_fraction", est(p.tangent_fraction)}, {"exposed_fraction", est(p.exposed_fraction)},
                    {"shell_fraction", est(p.shell_fraction)}, {"experimental", true}});
    const bool h = o.hull_samples > 0;
    csv += std::to_string(p.n) + ",pivot," + std::to_string(o.samples) + "," + std::to_string(C) + "," +
           fmt(p.displacement.mean) + "," + fmt(p.displacement.se) + "," + fmt(p.displacement.mean / p.n) + "," +
           fmt(p.iti.mean) + "," + fmt(p.iti.se) + "," + fmt(p.iti.mean / p.n) + ",,," + fmt(p.acceptance) + "," +
           (h ? fmt(p.tangent_fraction.mean) : "") + "," + (h ? fmt(p.exposed_fraction.mean) : "") + "," +
           (h ? fmt(p.shell_fraction.mean) : "") + ",,,,,,1\n";
  }

  const BallisticReport rep = make_ballistic_report(C, ballistic);
  double min_iti = 1e9;
  for (const BallisticRow& b : rep.rows)
    if (b.n >= 2) min_iti = std::min(min_iti, b.mean_iti / b.n);
  const double se = std::hypot(rep.fit.slope_se, rep.fit.slope_se_sampling);
  if (o.n_table >= 2) record("exact_boundary_min_positive", min_tangent > 0, {{"min", to_string(min_tangent)}});
  if (o.hull_samples && !prow.empty())
    record("sampled_boundary_floor", min_hull >= o.floor_boundary, {{"min_mean", min_hull}, {"floor", o.floor_boundary}});
  record("displacement_floor", rep.min_disp_ratio >= o.floor_disp, {{"min", rep.min_disp_ratio}, {"floor", o.floor_disp}});
  record("iti_floor", min_iti >= o.floor_iti, {{"min", min_iti}, {"floor", o.floor_iti}});
  record("slope", rep.fit.slope > 0 && se < o.max_rel_se * rep.fit.slope,
         {{"slope", rep.fit.slope}, {"intercept", rep.fit.intercept}, {"slope_se_residual", rep.fit.slope_se},
          {"slope_se_sampling", rep.fit.slope_se_sampling}, {"slope_se", se}, {"max_relative_se", o.max_rel_se}});

  const json prov = run.provenance(tiling_info());
  run.write("experiment.csv", csv_header(prov) + csv);
  run.write("lemma.csv", csv_header(prov) + lemma_csv);
  json doc = {{"provenance", prov}, {"C", C}, {"calibration", cal_json}, {"rows", rows},
              {"fit", {{"slope", rep.fit.slope}, {"intercept", rep.fit.intercept}, {"slope_se", se}}},
              {"pass", failures.empty()}, {"failures", failures}, {"checks", checks}};
  run.write("experiment.json", doc.dump(1) + "\n");
  if (!failures.empty()) std::cerr << json{{"failures", failures}}.dump() << "\n";
  return failures.empty();
}

// ---------------------------------------------------------------------------

struct RenderOpts {
  int n = 8;
  int i = -1;
  int R = -1;
  int size = 800;
  std::string walk;
};

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else o += c;
  }
  return o;
}

void cmd_render(const Run& run, const RenderOpts& o) {
  Walk w;
  if (!o.walk.empty()) {
    for (const auto& v : json::parse(o.walk)) w.push_back(v.get<VertexId>());
    if (w.empty()) throw Error("empty walk");
  } else {
    if (o.n < 1 || o.n > 20) throw Error("render samples walks with 1 <= n <= 20");
    const ExactSampler<Tiling> s(tiling(), o.n);
    Rng rng(run.g.seed, 0);
    w = s.sample(rng);
  }
  check_walk(tiling(), w);
  const int n = static_cast<int>(w.size()) - 1;
  const int R = o.R >= 0 ? o.R : n + 1;
  if (R > 12) throw Error("render radius above 12 is too large to draw");
  const Lattice l = build_ball_with_coordinates(R);
  check_walk(l, w);

  std::optional<int> idx;
  std::optional<Automorphism> mirror;
  if (o.i >= 0) {
    if (o.i < 1 || o.i >= n) throw Error("i must satisfy 0 < i < n");
    const WalkBoundary b = walk_boundary(tiling(), w);
    const int k = b.tangent_slot[static_cast<std::size_t>(o.i)];
    if (k < 0) {
      std::cout << "gamma(" << o.i << ") is not on the tangent boundary; drawing without a mirror\n";
    } else {
      idx = o.i;
      mirror = Automorphism::reflection(w[static_cast<std::size_t>(o.i)], k);
    }
  }
  RenderOptions ro;
  ro.size = o.size;
  std::string svg = render_walk(l, w, idx, mirror, ro);
  json lat = {{"kind", "ball"}, {"radius", R}, {"digest", canonical_digest(l)}};
  json prov = run.provenance(lat);
  prov["walk"] = walk_json(w);
  const std::size_t cut = svg.find('\n') + 1;
  svg.insert(cut, "<metadata id=\"provenance\">" + xml_escape(prov.dump()) + "</metadata>\n");
  run.write("walk_n" + std::to_string(n) + "_seed" + std::to_string(run.g.seed) + ".svg", svg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-avoiding walks on the {3,7} triangulation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file; [command] sections, flags override");

  Global g;
  if (const char* env = std::getenv("HSAW_OUT_DIR")) g.out = env;
  if (g.out.empty()) g.out = ".";
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--out", g.out, "output directory (default $HSAW_OUT_DIR or .)");
  app.add_option("--workers", g.workers, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  BuildOpts bo;
  auto* build = app.add_subcommand("build", "lattice ball JSON with its canonical digest");
  build->add_option("--R", bo.R, "ball radius")->check(CLI::Range(1, kMaxBallRadius));
  build->add_option("--mode", bo.mode, "geometric|combinatorial")->check(CLI::IsMember({"geometric", "combinatorial"}));

  EnumerateOpts eo;
  auto* en = app.add_subcommand("enumerate", "exact walk counts c_1..c_n as CSV");
  en->add_option("--n", eo.n, "walk length")->required()->check(CLI::Range(1, 40));
  en->add_option("--prefix-depth", eo.prefix_depth, "parallel prefix length")->check(CLI::Range(1, 8));

  SampleOpts so;
  auto* sa = app.add_subcommand("sample", "newline-delimited JSON walk stream");
  sa->add_option("--n", so.n, "walk length")->check(CLI::Range(1, 40));
  sa->add_option("--sampler", so.sampler, "exact|pivot")->check(CLI::IsMember({"exact", "pivot"}));
  sa->add_option("--samples", so.samples, "number of walks");
  sa->add_option("--burn-in", so.burn_in, "pivot burn-in, in units of n proposals");
  sa->add_option("--thin", so.thin, "pivot proposals between samples, in units of n");
  sa->add_option("--moves", so.moves, "reflections|dihedral")->check(CLI::IsMember({"reflections", "dihedral"}));

  VerifyOpts vo;
  auto* ve = app.add_subcommand("verify", "property suite; exit 1 on any failed check");
  ve->add_option("--n", vo.n, "largest exact walk length")->check(CLI::Range(2, 10));
  ve->add_option("--C", vo.C, "inverse triangle constant (-1: calibrated)")->check(CLI::Range(-1, 64));
  ve->add_option("--R", vo.R, "largest radius for the dual construction check")->check(CLI::Range(1, 14));
  ve->add_option("--thinness-R", vo.thinness_R, "thinness audit radius")->check(CLI::Range(0, 6));
  ve->add_option("--delta", vo.delta, "thinness constant")->check(CLI::NonNegativeNumber);
  ve->add_option("--hull", vo.hull, "one-step|fixpoint")->check(CLI::IsMember({"one-step", "fixpoint"}));
  ve->add_option("--checks", vo.checks, "subset of dual,thinness,closure,fibers,chain")->delimiter(',');

  ExperimentOpts xo;
  auto* ex = app.add_subcommand("experiment", "ballisticity and lemma fractions as CSV/JSON");
  ex->add_option("--n-exact", xo.n_exact, "exact rows for n <= this")->check(CLI::Range(1, 14));
  ex->add_option("--n-table", xo.n_table, "reflection-table lemma data for n <= this")->check(CLI::Range(0, 9));
  ex->add_option("--pivot-n", xo.pivot_n, "pivot lengths, a:b[:step] or a,b,c");
  ex->add_option("--samples", xo.samples, "pivot samples per n");
  ex->add_option("--burn-in", xo.burn_in, "burn-in, in units of n proposals");
  ex->add_option("--thin", xo.thin, "proposals between samples, in units of n");
  ex->add_option("--moves", xo.moves, "reflections|dihedral")->check(CLI::IsMember({"reflections", "dihedral"}));
  ex->add_option("--hull-samples", xo.hull_samples, "pivot walks per n that get hull fractions");
  ex->add_option("--shell-d", xo.shell_d, "shell width")->check(CLI::NonNegativeNumber);
  ex->add_option("--C", xo.C, "inverse triangle constant (-1: calibrated)")->check(CLI::Range(-1, 64));
  ex->add_option("--calibrate-n", xo.calibrate_n, "walk length for the C calibration")->check(CLI::Range(2, 9));
  ex->add_option("--C-sweep", xo.c_sweep, "C values for the ITI fractions");
  ex->add_option("--hull", xo.hull, "one-step|fixpoint")->check(CLI::IsMember({"one-step", "fixpoint"}));
  ex->add_option("--boundary", xo.boundary, "tangent|exposed")->check(CLI::IsMember({"tangent", "exposed"}));
  ex->add_option("--floor-boundary", xo.floor_boundary, "sampled boundary-fraction floor");
  ex->add_option("--floor-disp", xo.floor_disp, "displacement/n floor");
  ex->add_option("--floor-iti", xo.floor_iti, "|{i : A_i}|/n floor");
  ex->add_option("--max-rel-se", xo.max_rel_se, "largest slope standard error relative to the slope");

  RenderOpts ro;
  auto* re = app.add_subcommand("render", "Poincare-disk SVG of a walk");
  re->add_option("--n", ro.n, "walk length for a sampled walk");
  re->add_option("--i", ro.i, "reflect at this index (-1: none)");
  re->add_option("--R", ro.R, "lattice radius (-1: n+1)");
  re->add_option("--size", ro.size, "pixels")->check(CLI::Range(64, 8192));
  re->add_option("--walk", ro.walk, "explicit walk as a JSON array of vertex ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (g.workers > 0) omp_set_num_threads(g.workers);

  Run run;
  run.g = g;
  run.dir = g.out;
  CLI::App* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  run.config = options_of(sub);

  try {
    bool ok = true;
    if (sub == build) cmd_build(run, bo);
    else if (sub == en) cmd_enumerate(run, eo);
    else if (sub == sa) cmd_sample(run, so);
    else if (sub == ve) ok = cmd_verify(run, vo);
    else if (sub == ex) ok = cmd_experiment(run, xo);
    else if (sub == re) cmd_render(run, ro);
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
