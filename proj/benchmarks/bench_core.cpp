#include <benchmark/benchmark.h>

#include "hourglass/flat_geometry.hpp"
#include "hourglass/triangulation.hpp"

using namespace hourglass;

static void BM_Delaunay(benchmark::State& state) {
  FlatSurface g = genus2_example(1.0, 0.05, 1.0);
  for (auto _ : state) {
    Triangulation tri = delaunay(g);
    benchmark::DoNotOptimize(tri.live_triangle_count());
  }
}
BENCHMARK(BM_Delaunay);

static void BM_SaddleConnections(benchmark::State& state) {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = delaunay(t);
  for (auto _ : state) {
    auto scs = enumerate_saddle_connections(tri, 3.0);
    benchmark::DoNotOptimize(scs.size());
  }
}
BENCHMARK(BM_SaddleConnections);

BENCHMARK_MAIN();
