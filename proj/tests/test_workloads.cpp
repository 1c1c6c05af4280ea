#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "cachesim/error.hpp"
#include "cachesim/workloads.hpp"
#include "oracle.hpp"

using namespace cachesim;

namespace {

using Key = std::tuple<std::uint64_t, AccessKind, std::uint8_t>;

std::vector<Key> multiset(const Trace& t) {
  std::vector<Key> out;
  for (const auto& a : t) {
    if (!a.is_noop()) out.emplace_back(a.address, a.kind, a.array_tag);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Key> multiset(const GpuWorkload& w) {
  Trace flat;
  for (const auto& launch : collect(w)) {
    for (const auto& t : launch) flat.insert(flat.end(), t.steps.begin(), t.steps.end());
  }
  return multiset(flat);
}

Trace cpu_trace(const Workload& w) { return collect(std::get<CpuWorkload>(w)); }

std::uint64_t misses_of(const Trace& t, std::uint8_t tag) {
  Hierarchy h(cpu_preset());
  h.run_trace(t);
  return h.stats(0).misses_by_tag[tag];
}

}  // namespace

TEST(Matmul, Lengths) {
  EXPECT_EQ(cpu_trace(gen_matmul_naive(2, Platform::CPU)).size(), 20u);
  const Trace one = cpu_trace(gen_matmul_naive(1, Platform::CPU));
  ASSERT_EQ(one.size(), 3u);
  EXPECT_EQ(one[0].kind, AccessKind::READ);
  EXPECT_EQ(one[1].kind, AccessKind::READ);
  EXPECT_EQ(one[2].kind, AccessKind::WRITE);
  const Workload blocked = gen_matmul_blocked(8, 2, Variant::EQUAL_TILES, Platform::CPU);
  const auto& w = std::get<CpuWorkload>(blocked);
  EXPECT_EQ(collect(w).size(), w.length);
  EXPECT_EQ(w.length, 2u * 512 + 64 * 4 + 64 * 3);
}

TEST(Matmul, ColumnWalkOfBMissesMore) {
  const Trace t = cpu_trace(gen_matmul_naive(64, Platform::CPU));
  EXPECT_GE(misses_of(t, tags::B), misses_of(t, tags::A));
}

TEST(Matmul, BlockEqualsNDegenerates) {
  const Trace naive = cpu_trace(gen_matmul_naive(16, Platform::CPU));
  for (Variant v : {Variant::HP_BLOCKS, Variant::EQUAL_TILES}) {
    EXPECT_EQ(multiset(cpu_trace(gen_matmul_blocked(16, 16, v, Platform::CPU))), multiset(naive));
  }
}

TEST(Matmul, BlockedVariantsSameReads) {
  // Blocking reorders the inner products; reads of A and B are unchanged.
  auto reads = [](const Trace& t) {
    Trace r;
    for (const auto& a : t) {
      if (a.array_tag != tags::C) r.push_back(a);
    }
    return multiset(r);
  };
  const Trace naive = cpu_trace(gen_matmul_naive(16, Platform::CPU));
  EXPECT_EQ(reads(cpu_trace(gen_matmul_blocked(16, 4, Variant::HP_BLOCKS, Platform::CPU))), reads(naive));
  EXPECT_EQ(reads(cpu_trace(gen_matmul_blocked(16, 4, Variant::EQUAL_TILES, Platform::CPU))), reads(naive));
}

TEST(Matmul, BlockMismatch) {
  try {
    gen_matmul_blocked(100, 24, Variant::EQUAL_TILES, Platform::CPU);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::BLOCK_MISMATCH);
  }
}

TEST(Matmul, EqualTilesBeatNaiveOnCpu) {
  Hierarchy naive(cpu_preset());
  naive.run_trace(cpu_trace(gen_matmul_naive(128, Platform::CPU)));
  Hierarchy tiled(cpu_preset());
  tiled.run_trace(cpu_trace(gen_matmul_blocked(128, 16, Variant::EQUAL_TILES, Platform::CPU)));
  EXPECT_LT(tiled.stats(0).misses, naive.stats(0).misses);
}

TEST(Matmul, GpuThreadShape) {
  const Workload naive = gen_matmul_naive(4, Platform::GPU);
  const auto& w = std::get<GpuWorkload>(naive);
  const auto traces = collect(w);
  ASSERT_EQ(traces.size(), 1u);
  // One 16x16 block covers the 4x4 matrix; 240 threads are idle.
  std::size_t active = 0;
  for (const auto& t : traces[0]) active += t.steps[0].is_noop() ? 0 : 1;
  EXPECT_EQ(active, 16u);
  EXPECT_EQ(w.access_count(), 16u * (2 * 4 + 1));
}

TEST(Matmul, SharedTilesTooLarge) {
  GenOptions opt;
  opt.exec.threads_per_block = 1024;
  opt.exec.block_dim_x = 32;
  opt.shared_memory_bytes = 16 * 1024;  // 2 * 32 * 32 * 8 = 16KB fits exactly
  EXPECT_NO_THROW(gen_matmul_blocked(64, 32, Variant::SHARED_TILES, Platform::GPU, opt));
  opt.shared_memory_bytes = 16 * 1024 - 8;
  try {
    gen_matmul_blocked(64, 32, Variant::SHARED_TILES, Platform::GPU, opt);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TILE_TOO_LARGE);
  }
}

TEST(Fusion, SameMultisetCpu) {
  for (std::uint64_t n : {1u, 7u, 1000u}) {
    const Trace sep = collect(gen_loop_fusion(n, false));
    const Trace fus = collect(gen_loop_fusion(n, true));
    EXPECT_EQ(sep.size(), 6 * n);
    EXPECT_EQ(fus.size(), 6 * n);
    EXPECT_EQ(multiset(sep), multiset(fus));
    if (n > 1) EXPECT_NE(sep, fus);
  }
}

TEST(Fusion, SameMultisetGpu) {
  const GpuWorkload sep = gen_kernel_fusion(100, false);
  const GpuWorkload fus = gen_kernel_fusion(100, true);
  EXPECT_EQ(sep.launches.size(), 2u);
  EXPECT_EQ(fus.launches.size(), 1u);
  EXPECT_EQ(sep.access_count(), 600u);
  EXPECT_EQ(fus.access_count(), 600u);
  EXPECT_EQ(multiset(sep), multiset(fus));
  EXPECT_EQ(collect(gen_kernel_fusion(32, true))[0][0].steps.size(), 6u);
}

TEST(Fusion, FusedMissesLessOnCpu) {
  const std::uint64_t n = 4 * 32 * 1024 / 8;
  Hierarchy sep(cpu_preset());
  sep.run_trace(collect(gen_loop_fusion(n, false)));
  Hierarchy fus(cpu_preset());
  fus.run_trace(collect(gen_loop_fusion(n, true)));
  EXPECT_LT(fus.stats(0).misses, sep.stats(0).misses);
}

TEST(Merge, CpuLinesPerVisit) {
  auto lines_of_first_visit = [](bool merged) {
    const Trace t = cpu_trace(gen_array_merge(64, merged, Platform::CPU));
    std::set<std::uint64_t> lines;
    for (std::size_t i = 0; i < 3; ++i) lines.insert(t[i].address / 64);
    return lines.size();
  };
  EXPECT_EQ(lines_of_first_visit(false), 3u);
  EXPECT_EQ(lines_of_first_visit(true), 1u);
  EXPECT_EQ(cpu_trace(gen_array_merge(64, false, Platform::CPU)).size(), 12u);
}

TEST(Merge, SameLogicalElements) {
  // Strip the merged layout: recover (array, index) from each address.
  auto logical = [](const Trace& t) {
    std::multiset<std::pair<int, std::uint64_t>> out;
    const std::uint64_t base = t[0].address;
    for (const auto& a : t) {
      const std::uint64_t e = (a.address - base) / 8;
      out.emplace(static_cast<int>(e % 3), e / 3);
    }
    return out;
  };
  const Trace un = cpu_trace(gen_array_merge(256, false, Platform::CPU));
  const Trace me = cpu_trace(gen_array_merge(256, true, Platform::CPU));
  ASSERT_EQ(un.size(), me.size());
  for (std::size_t i = 0; i < un.size(); ++i) {
    EXPECT_EQ(un[i].kind, me[i].kind);
    EXPECT_EQ(un[i].array_tag, me[i].array_tag);
  }
  const auto l = logical(me);
  for (std::uint64_t i = 0; i < 256; i += 16) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(l.count({j, i}), 1u);
  }
}

TEST(Merge, RejectsTooSmall) {
  try {
    gen_array_merge(8, false, Platform::CPU);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SIZE_MISMATCH);
  }
}

TEST(Merge, GpuThreadPerStride) {
  const GpuWorkload w = std::get<GpuWorkload>(gen_array_merge(64 * 40, true, Platform::GPU));
  const auto traces = collect(w);
  EXPECT_EQ(traces[0].size(), 40u);
  EXPECT_EQ(traces[0][1].steps[0].address - traces[0][0].steps[0].address, 64u * 3 * 8);
}

TEST(Layout, TileAddressMap) {
  const std::uint64_t base = 0x1000;
  for (std::uint64_t c = 0; c < 4; ++c) EXPECT_EQ(tile_address_map(0, c, 8, 4, 8, base) / 128, base / 128);
  EXPECT_EQ(tile_address_map(0, 0, 8, 4, 8, base), base);
  EXPECT_EQ(tile_address_map(0, 4, 8, 4, 8, base), base + 128);
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 8; ++r) {
    for (std::uint64_t c = 0; c < 8; ++c) {
      const std::uint64_t a = tile_address_map(r, c, 8, 4, 8, base);
      EXPECT_GE(a, base);
      EXPECT_LT(a, base + 64 * 8);
      seen.insert(a);
    }
  }
  EXPECT_EQ(seen.size(), 64u);
  EXPECT_THROW(tile_address_map(8, 0, 8, 4, 8, base), SimError);
  EXPECT_THROW(tile_address_map(0, 0, 10, 4, 8, base), SimError);
}

TEST(Layout, MergedAos) {
  LayoutMap m{LayoutKind::MERGED_AOS, 4, 3, 8};
  EXPECT_EQ(m.address(0, 5, 2), (5 * 3 + 2) * 8u);
}

TEST(Layout, MergedTilesAdjacent) {
  const GpuWorkload un = gen_texture_merge(16, false);
  const GpuWorkload me = gen_texture_merge(16, true);
  // Thread 0 reads (0,0) of both inputs.
  const auto tu = collect(un)[0][0].steps;
  const auto tm = collect(me)[0][0].steps;
  EXPECT_EQ(tm[1].address - tm[0].address, 128u);
  EXPECT_GT(tu[1].address - tu[0].address, 16u * 16 * 8);
  try {
    gen_texture_merge(18, true);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SIZE_MISMATCH);
  }
}

TEST(Layout, PlannerSeparatesArrays) {
  AddressPlanner p;
  const std::uint64_t a = p.place("a", 100);
  const std::uint64_t b = p.place("b", 4096);
  const std::uint64_t c = p.place("c", 8);
  EXPECT_EQ(a % 4096, 0u);
  EXPECT_GE(b, a + 100 + 128);
  EXPECT_GE(c, b + 4096 + 128);
  AddressPlanner q({{"b", 0x40}});
  q.place("a", 8);
  EXPECT_EQ(q.place("b", 8), 0x40u);
}

TEST(Transpose, SameLogicalBElements) {
  EXPECT_EQ(cpu_trace(gen_transpose_matmul(1, false, Platform::CPU)),
            cpu_trace(gen_transpose_matmul(1, true, Platform::CPU)));
  EXPECT_EQ(multiset(cpu_trace(gen_transpose_matmul(8, false, Platform::CPU))),
            multiset(cpu_trace(gen_transpose_matmul(8, true, Platform::CPU))));
}

TEST(Transpose, GpuWarpSegments) {
  GenOptions opt;
  opt.exec.block_dim_x = 32;
  for (bool transposed : {false, true}) {
    const Workload workload = gen_transpose_matmul(64, transposed, Platform::GPU, opt);
    const auto& w = std::get<GpuWorkload>(workload);
    const auto threads = materialize(*w.launches[0]);
    // Warp 0: row 0, columns 0..31. Step 1 reads B (k = 0).
    std::vector<MemoryAccess> step;
    for (std::uint32_t t = 0; t < 32; ++t) step.push_back(threads[t].steps[1]);
    EXPECT_EQ(coalesce_warp(step, 128).size(), transposed ? 32u : 2u);
  }
}

TEST(Transpose, OverheadLength) {
  for (std::uint64_t n : {1u, 5u, 64u}) EXPECT_EQ(collect(gen_transpose_overhead(n)).size(), 2 * n * n);
}

TEST(Properties, AlignedAndDeterministic) {
  std::vector<WorkloadSpec> specs;
  for (Technique t : {Technique::BLOCKING, Technique::FUSION, Technique::MERGING, Technique::TRANSPOSE}) {
    for (Variant v : variants_of(t)) {
      for (Platform p : {Platform::CPU, Platform::GPU}) {
        if (!supports(v, p)) continue;
        WorkloadSpec s;
        s.technique = t;
        s.platform = p;
        s.variant = v;
        s.n = t == Technique::MERGING && (v == Variant::UNMERGED || v == Variant::MERGED) ? 256 : 16;
        s.block = 4;
        specs.push_back(s);
      }
    }
  }
  for (const WorkloadSpec& s : specs) {
    GenOptions opt = gen_options_for(s);
    opt.exec.threads_per_block = 16;
    opt.exec.block_dim_x = 4;
    opt.exec.warp_size = 16;
    const Workload a = make_workload(s, opt);
    const Workload b = make_workload(s, opt);
    if (const auto* cpu = std::get_if<CpuWorkload>(&a)) {
      const Trace ta = collect(*cpu);
      EXPECT_EQ(ta, collect(std::get<CpuWorkload>(b))) << to_string(s.variant);
      EXPECT_EQ(ta.size(), cpu->length) << to_string(s.variant);
      for (const auto& x : ta) EXPECT_TRUE(is_well_formed(x));
    } else {
      const auto ga = collect(std::get<GpuWorkload>(a));
      EXPECT_EQ(ga, collect(std::get<GpuWorkload>(b))) << to_string(s.variant);
      for (const auto& launch : ga) {
        for (const auto& t : launch) {
          for (const auto& x : t.steps) EXPECT_TRUE(x.is_noop() || is_well_formed(x));
        }
      }
    }
  }
}

TEST(Spec, Validation) {
  WorkloadSpec s;
  s.technique = Technique::BLOCKING;
  s.platform = Platform::CPU;
  s.n = 100;
  s.block = 24;
  s.variant = Variant::NAIVE;
  EXPECT_THROW(validate(s), SimError);
  s.block = 25;
  EXPECT_NO_THROW(validate(s));
  s.variant = Variant::SHARED_TILES;
  EXPECT_THROW(validate(s), SimError);
  s.variant = Variant::FUSED;
  EXPECT_THROW(validate(s), SimError);
}
