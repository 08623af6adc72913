// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "hsaw/analysis.hpp"
#include "hsaw/tiling.hpp"

using namespace hsaw;

namespace {

const Tiling& tiling() {
  static const Tiling t;
  return t;
}

const Lattice& ball6() {
  static const Lattice b = build_ball(6, BuildMode::combinatorial);
  return b;
}

void count_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(count_walks_serial(tiling(), static_cast<int>(s.range(0))));
}

void count_parallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(count_walks(tiling(), static_cast<int>(s.range(0))));
}

void thinness_serial(benchmark::State& s) {
  const int r = static_cast<int>(s.range(0));
  for (auto _ : s) benchmark::DoNotOptimize(thinness_audit_serial(ball6(), r, 1));
}

void thinness_parallel(benchmark::State& s) {
  const int r = static_cast<int>(s.range(0));
  for (auto _ : s) benchmark::DoNotOptimize(thinness_audit(ball6(), r, 1));
}

ExactMoments moments_init(int n) {
  ExactMoments m;
  m.n = n;
  m.C = 2;
  return m;
}

void moments_serial(benchmark::State& s) {
  const int n = static_cast<int>(s.range(0));
  for (auto _ : s) {
    auto r = fold_walks_serial(tiling(), n, moments_init(n), [](ExactMoments& m, const Walk& w) {
      const auto d = static_cast<std::uint64_t>(tiling().depth(w.back()));
      const auto k = static_cast<std::uint64_t>(iti_count(tiling(), w, 2));
      ++m.walks;
      m.sum_disp += d;
      m.sum_disp2 += d * d;
      m.sum_iti += k;
      m.sum_iti2 += k * k;
    });
    benchmark::DoNotOptimize(r);
  }
}

void moments_parallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(exact_moments(tiling(), static_cast<int>(s.range(0)), 2));
}

}  // namespace

BENCHMARK(count_serial)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(count_parallel)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(thinness_serial)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(thinness_parallel)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(moments_serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(moments_parallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
