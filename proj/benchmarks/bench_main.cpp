#include <benchmark/benchmark.h>

#include <random>

#include "cachesim/cache_model.hpp"
#include "cachesim/gpu_exec.hpp"

using namespace cachesim;

namespace {

Trace random_trace(std::size_t length, std::uint64_t footprint) {
  std::mt19937_64 rng(1);
  Trace t(length);
  for (auto& a : t) a = MemoryAccess{(rng() % footprint) & ~7ULL, 0, 8, AccessKind::READ, 0};
  return t;
}

void BM_CpuHierarchy(benchmark::State& state) {
  const Trace t = random_trace(1 << 16, static_cast<std::uint64_t>(state.range(0)));
  Hierarchy h(cpu_preset());
  for (auto _ : state) {
    for (const auto& a : t) benchmark::DoNotOptimize(h.access(a));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_CpuHierarchy)->Arg(16 << 10)->Arg(1 << 20)->Arg(64 << 20);

void BM_GpuHierarchy(benchmark::State& state) {
  const Trace t = random_trace(1 << 16, 4 << 20);
  Hierarchy h(gpu_preset(GpuCacheMode::L1_48K));
  for (auto _ : state) {
    for (const auto& a : t) benchmark::DoNotOptimize(h.access(a));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_GpuHierarchy);

void BM_CoalesceWarp(benchmark::State& state) {
  const std::uint64_t spacing = static_cast<std::uint64_t>(state.range(0));
  std::vector<MemoryAccess> step;
  for (std::uint32_t t = 0; t < 32; ++t) step.push_back(MemoryAccess{t * spacing, t, 8, AccessKind::READ, 0});
  for (auto _ : state) benchmark::DoNotOptimize(coalesce_warp(step, 128));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_CoalesceWarp)->Arg(8)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
