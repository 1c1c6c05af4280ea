// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cachesim/harness.hpp"
#include "oracle.hpp"

using namespace cachesim;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    ok = ok && cond;
    if (!detail.empty()) detail += "; ";
    detail += (cond ? "" : "NOT ") + what;
  }
};

std::string num(std::uint64_t v) { return std::to_string(v); }

ExperimentConfig experiment(const std::string& id, Technique t, Platform p, Variant v, std::uint64_t n,
                            std::optional<GpuCacheMode> mode = std::nullopt) {
  ExperimentConfig c;
  c.id = id;
  c.workload.technique = t;
  c.workload.platform = p;
  c.workload.variant = v;
  c.workload.n = n;
  c.hierarchy.preset = p;
  if (p == Platform::GPU) {
    c.hierarchy.mode = mode.value_or(GpuCacheMode::L1_16K);
    c.exec = ExecModelConfig{};
    c.exec->segment_size = resolve(c.hierarchy).first_enabled_line_size();
  }
  return c;
}

std::uint64_t misses(const SimResult& r, const char* level) { return r.level(level)->stats.misses; }
std::uint64_t fetched(const SimResult& r, const char* level) { return r.level(level)->stats.lines_fetched; }

Check oracle_equivalence() {
  Check c;
  std::uint64_t mismatches = 0;
  std::uint64_t list_mismatches = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto lines = oracle::random_lines(0x5eed0000 + trial, 10000, 256);
    Trace t;
    t.reserve(lines.size());
    for (std::uint64_t l : lines) t.push_back(MemoryAccess{l * 64, 0, 8, AccessKind::READ, 0});
    for (std::uint32_t cap : {4u, 16u, 64u}) {
      HierarchyConfig h;
      h.levels = {CacheLevelConfig{"L1", 64ULL * cap, 64, cap}};
      Hierarchy sim(h);
      const std::uint64_t engine = sim.run_trace(t).levels[0].stats.misses;
      const std::uint64_t stack = stack_distance_oracle(lines, cap);
      mismatches += engine != stack;
      list_mismatches += engine != oracle::lru_misses(lines, cap);
    }
  }
  c.require(mismatches == 0, "engine == stack-distance oracle on 300 cases (" + num(mismatches) + " mismatches)");
  c.require(list_mismatches == 0, "engine == list LRU reference (" + num(list_mismatches) + " mismatches)");
  return c;
}

Check cpu_blocking() {
  std::vector<ExperimentConfig> cfgs{
      experiment("naive", Technique::BLOCKING, Platform::CPU, Variant::NAIVE, 256),
      experiment("hp", Technique::BLOCKING, Platform::CPU, Variant::HP_BLOCKS, 256),
      experiment("eq", Technique::BLOCKING, Platform::CPU, Variant::EQUAL_TILES, 256),
  };
  for (auto& e : cfgs) e.workload.block = 16;
  const auto r = run_experiments(cfgs);
  Check c;
  c.require(misses(r[2], "L1") < misses(r[0], "L1"),
            "L1 EQUAL_TILES " + num(misses(r[2], "L1")) + " < NAIVE " + num(misses(r[0], "L1")));
  c.require(misses(r[1], "L1") < misses(r[0], "L1"),
            "L1 HP_BLOCKS " + num(misses(r[1], "L1")) + " < NAIVE " + num(misses(r[0], "L1")));
  return c;
}

Check gpu_blocking() {
  std::vector<ExperimentConfig> cfgs{
      experiment("shared", Technique::BLOCKING, Platform::GPU, Variant::SHARED_TILES, 256, GpuCacheMode::L1_48K),
      experiment("eq48", Technique::BLOCKING, Platform::GPU, Variant::EQUAL_TILES, 256, GpuCacheMode::L1_48K),
      experiment("naive16", Technique::BLOCKING, Platform::GPU, Variant::NAIVE, 256, GpuCacheMode::L1_16K),
      experiment("eq_off", Technique::BLOCKING, Platform::GPU, Variant::EQUAL_TILES, 256, GpuCacheMode::L1_OFF),
  };
  for (auto& e : cfgs) e.workload.block = 16;
  const auto r = run_experiments(cfgs);
  const std::uint64_t shared = fetched(r[0], "L2");
  const std::uint64_t eq = fetched(r[1], "L2");
  const std::uint64_t naive = fetched(r[2], "L2");
  Check c;
  c.require(shared < eq, "L2 lines_fetched SHARED_TILES " + num(shared) + " < EQUAL_TILES(L1_48K) " + num(eq));
  c.require(eq < naive, "EQUAL_TILES(L1_48K) " + num(eq) + " < NAIVE(L1_16K) " + num(naive));
  const std::uint64_t off = fetched(r[3], "L2");
  c.require(eq < off, "EQUAL_TILES L2 lines_fetched 128B lines " + num(eq) + " < 32B lines (L1_OFF) " + num(off));
  // Shown for context only: traffic L1 sends to L2.
  c.detail += " | L1 misses: shared " + num(misses(r[0], "L1")) + ", eq48 " + num(misses(r[1], "L1")) +
              ", naive16 " + num(misses(r[2], "L1"));
  return c;
}

Check loop_fusion() {
  const auto r = run_experiments(std::vector<ExperimentConfig>{
      experiment("sep", Technique::FUSION, Platform::CPU, Variant::SEPARATE, 1 << 20),
      experiment("fus", Technique::FUSION, Platform::CPU, Variant::FUSED, 1 << 20)});
  Check c;
  c.require(misses(r[1], "L1") < misses(r[0], "L1"),
            "L1 fused " + num(misses(r[1], "L1")) + " < separate " + num(misses(r[0], "L1")));
  return c;
}

Check kernel_fusion() {
  const auto r = run_experiments(std::vector<ExperimentConfig>{
      experiment("sep48", Technique::FUSION, Platform::GPU, Variant::SEPARATE, 1 << 20, GpuCacheMode::L1_48K),
      experiment("fus48", Technique::FUSION, Platform::GPU, Variant::FUSED, 1 << 20, GpuCacheMode::L1_48K),
      experiment("fusoff", Technique::FUSION, Platform::GPU, Variant::FUSED, 1 << 20, GpuCacheMode::L1_OFF)});
  Check c;
  c.require(r[1].total_misses() < r[0].total_misses(), "L1+L2 fused(L1_48K) " + num(r[1].total_misses()) +
                                                           " < separate(L1_48K) " + num(r[0].total_misses()));
  c.require(r[2].total_misses() > r[1].total_misses(), "L1+L2 fused(L1_OFF) " + num(r[2].total_misses()) +
                                                           " > fused(L1_48K) " + num(r[1].total_misses()));
  return c;
}

Check cpu_merge() {
  auto with_lines = [](ExperimentConfig e, std::uint32_t line) {
    for (const char* name : {"L1", "L2", "L3"}) e.hierarchy.levels[name].line_size = line;
    return e;
  };
  const auto base = experiment("un", Technique::MERGING, Platform::CPU, Variant::UNMERGED, 1 << 20);
  const auto r = run_experiments(std::vector<ExperimentConfig>{
      base, experiment("me", Technique::MERGING, Platform::CPU, Variant::MERGED, 1 << 20), with_lines(base, 32),
      with_lines(base, 128)});
  Check c;
  c.require(misses(r[1], "L1") < misses(r[0], "L1"),
            "L1 merged " + num(misses(r[1], "L1")) + " < unmerged " + num(misses(r[0], "L1")));
  const std::uint64_t b32 = r[2].level("L3")->bytes_fetched();
  const std::uint64_t b128 = r[3].level("L3")->bytes_fetched();
  c.require(b32 < b128, "unmerged bytes fetched 32B lines " + num(b32) + " < 128B lines " + num(b128));
  return c;
}

Check gpu_merge() {
  std::vector<ExperimentConfig> cfgs;
  for (auto mode : {GpuCacheMode::L1_48K, GpuCacheMode::L1_16K, GpuCacheMode::L1_OFF}) {
    const std::string m(to_string(mode));
    cfgs.push_back(experiment("un_" + m, Technique::MERGING, Platform::GPU, Variant::UNMERGED, 1 << 20, mode));
    cfgs.push_back(experiment("me_" + m, Technique::MERGING, Platform::GPU, Variant::MERGED, 1 << 20, mode));
  }
  const auto r = run_experiments(cfgs);
  Check c;
  c.require(r[1].total_misses() <= r[3].total_misses(), "merged L1_48K " + num(r[1].total_misses()) +
                                                             " <= merged L1_16K " + num(r[3].total_misses()));
  for (std::size_t i = 0; i < r.size(); i += 2) {
    c.require(r[i + 1].total_misses() < r[i].total_misses(),
              std::string(to_string(*cfgs[i].hierarchy.mode)) + " merged " + num(r[i + 1].total_misses()) +
                  " < unmerged " + num(r[i].total_misses()));
  }
  return c;
}

Check texture_merge() {
  const auto r = run_experiments(std::vector<ExperimentConfig>{
      experiment("un", Technique::MERGING, Platform::GPU, Variant::TEXTURE_UNMERGED, 1024, GpuCacheMode::L1_16K),
      experiment("me", Technique::MERGING, Platform::GPU, Variant::TEXTURE_MERGED, 1024, GpuCacheMode::L1_16K)});
  Check c;
  c.require(r[1].total_misses() < r[0].total_misses(),
            "L1+L2 merged " + num(r[1].total_misses()) + " < unmerged " + num(r[0].total_misses()));
  return c;
}

Check transpose() {
  const auto r = run_experiments(std::vector<ExperimentConfig>{
      experiment("cpu_un", Technique::TRANSPOSE, Platform::CPU, Variant::UNTRANSPOSED, 512),
      experiment("cpu_tr", Technique::TRANSPOSE, Platform::CPU, Variant::TRANSPOSED, 512),
      experiment("gpu_un", Technique::TRANSPOSE, Platform::GPU, Variant::UNTRANSPOSED, 512),
      experiment("gpu_tr", Technique::TRANSPOSE, Platform::GPU, Variant::TRANSPOSED, 512),
      experiment("overhead", Technique::TRANSPOSE, Platform::CPU, Variant::TRANSPOSE_OVERHEAD, 512)});
  Check c;
  c.require(misses(r[1], "L1") < misses(r[0], "L1"),
            "CPU L1 transposed " + num(misses(r[1], "L1")) + " < untransposed " + num(misses(r[0], "L1")));
  c.require(r[3].transactions > r[2].transactions,
            "GPU transactions transposed " + num(r[3].transactions) + " > untransposed " + num(r[2].transactions));

  // Warp at fixed row, columns 0..31: the B step of k = 0.
  GenOptions opt;
  opt.exec.block_dim_x = 32;
  std::size_t per_warp[2];
  for (bool transposed : {false, true}) {
    const Workload workload = gen_transpose_matmul(512, transposed, Platform::GPU, opt);
    const auto& w = std::get<GpuWorkload>(workload);
    std::vector<MemoryAccess> step;
    for (std::uint32_t t = 0; t < 32; ++t) step.push_back(w.launches[0]->access(t, 1));
    per_warp[transposed] = coalesce_warp(step, 128).size();
  }
  c.require(per_warp[1] == 32 && per_warp[0] <= 2,
            "per-warp B-step transactions transposed " + num(per_warp[1]) + " == 32, untransposed " +
                num(per_warp[0]) + " <= 2");
  c.require(r[4].trace_length == 2ULL * 512 * 512, "overhead trace " + num(r[4].trace_length) + " == 2n^2");
  return c;
}

Check structural() {
  Check c;
  bool geometry = true;
  for (const HierarchyConfig& h : {cpu_preset(), gpu_preset(GpuCacheMode::L1_48K), gpu_preset(GpuCacheMode::L1_16K),
                                   gpu_preset(GpuCacheMode::L1_OFF)}) {
    for (const CacheLevelConfig& l : h.levels) {
      const CacheLevel cache(l);
      geometry = geometry && cache.set_count() * cache.ways() * l.line_size == l.capacity;
    }
  }
  c.require(geometry, "sets*ways*line == capacity for every preset level");

  auto sorted = [](Trace t) {
    std::sort(t.begin(), t.end(), [](const MemoryAccess& a, const MemoryAccess& b) {
      return std::tie(a.address, a.kind, a.array_tag) < std::tie(b.address, b.kind, b.array_tag);
    });
    return t;
  };
  auto flat = [](const GpuWorkload& w) {
    Trace t;
    for (const auto& launch : collect(w)) {
      for (const auto& th : launch) t.insert(t.end(), th.steps.begin(), th.steps.end());
    }
    return t;
  };
  const bool cpu_fusion = sorted(collect(gen_loop_fusion(4096, false))) == sorted(collect(gen_loop_fusion(4096, true)));
  const bool gpu_fusion =
      sorted(flat(gen_kernel_fusion(4096, false))) == sorted(flat(gen_kernel_fusion(4096, true)));
  c.require(cpu_fusion && gpu_fusion, "fused/separate access multisets equal (CPU and GPU)");

  const Trace naive = collect(std::get<CpuWorkload>(gen_matmul_naive(32, Platform::CPU)));
  bool degenerate = true;
  for (Variant v : {Variant::HP_BLOCKS, Variant::EQUAL_TILES}) {
    degenerate = degenerate &&
                 sorted(collect(std::get<CpuWorkload>(gen_matmul_blocked(32, 32, v, Platform::CPU)))) == sorted(naive);
  }
  c.require(degenerate, "b = n blocking equals naive multiset");

  std::vector<ExperimentConfig> cfgs{
      experiment("a", Technique::BLOCKING, Platform::CPU, Variant::EQUAL_TILES, 64),
      experiment("b", Technique::MERGING, Platform::GPU, Variant::MERGED, 1 << 14, GpuCacheMode::L1_48K),
      experiment("c", Technique::FUSION, Platform::CPU, Variant::FUSED, 1 << 14)};
  cfgs[0].workload.block = 8;
  cfgs[0].hierarchy.replacement = Replacement::RANDOM;
  cfgs[0].seed = 99;
  std::ostringstream first;
  std::ostringstream second;
  emit_csv(run_experiments(cfgs), first);
  emit_csv(run_experiments(cfgs), second);
  c.require(first.str() == second.str(), "two runs give byte-identical CSV");
  return c;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Check()> run;
  double budget_s;  // 0 = no limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence, 10},
      {2, "CPU blocking direction (n=256, b=16)", cpu_blocking, 60},
      {3, "GPU blocking direction (n=256, b=16)", gpu_blocking, 0},
      {4, "loop fusion direction (n=2^20)", loop_fusion, 0},
      {5, "kernel fusion direction (n=2^20)", kernel_fusion, 0},
      {6, "CPU array merging direction (n=2^20)", cpu_merge, 0},
      {7, "GPU array merging direction (n=2^20)", gpu_merge, 0},
      {8, "texture merging direction (n=1024)", texture_merge, 0},
      {9, "transpose directions (n=512)", transpose, 0},
      {10, "structural properties", structural, 5},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0 && secs >= cr.budget_s) {
      c.ok = false;
      c.detail += "; over time budget";
    }
    failed += c.ok ? 0 : 1;
    std::printf("%s %2d %s [%.2fs] %s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, secs, c.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
