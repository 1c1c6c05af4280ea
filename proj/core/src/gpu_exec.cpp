#include <algorithm>
#include <bit>
#include <string>
#include <utility>

#include "cachesim/error.hpp"
#include "cachesim/gpu_exec.hpp"

namespace cachesim {

std::uint32_t ExecModelConfig::resident_blocks() const noexcept {
  const std::uint32_t per_block = warps_per_block();
  if (per_block == 0) return 1;
  return std::max<std::uint32_t>(1, max_resident_warps / per_block);
}

void validate(const ExecModelConfig& cfg) {
  auto fail = [](const std::string& what) { throw SimError(ErrorCode::VALIDATION_ERROR, "exec: " + what); };
  if (cfg.warp_size == 0 || cfg.warp_size > 64) fail("warp_size must be in [1, 64]");
  if (cfg.threads_per_block == 0 || cfg.threads_per_block % cfg.warp_size != 0) {
    fail("threads_per_block must be a positive multiple of warp_size");
  }
  if (cfg.block_dim_x == 0 || cfg.threads_per_block % cfg.block_dim_x != 0) {
    fail("block_dim_x must divide threads_per_block");
  }
  if (cfg.num_sms == 0) fail("num_sms must be positive");
  if (!is_power_of_two(cfg.segment_size) || cfg.segment_size < 16) {
    fail("segment_size must be a power of two of at least 16 bytes");
  }
  if (cfg.max_resident_warps == 0) fail("max_resident_warps must be positive");
}

std::uint32_t Transaction::lane_count() const noexcept {
  return static_cast<std::uint32_t>(std::popcount(lane_mask));
}

std::vector<std::uint32_t> Transaction::contributing_threads(std::span<const std::uint32_t> lane_threads) const {
  std::vector<std::uint32_t> out;
  for (std::size_t lane = 0; lane < lane_threads.size() && lane < 64; ++lane) {
    if (lane_mask & (std::uint64_t{1} << lane)) out.push_back(lane_threads[lane]);
  }
  return out;
}

void coalesce_warp_into(std::span<const MemoryAccess> step, std::uint32_t segment_size, bool coalescing,
                        std::vector<Transaction>& out) {
  out.clear();
  const std::uint64_t mask = ~static_cast<std::uint64_t>(segment_size - 1);
  for (std::size_t lane = 0; lane < step.size(); ++lane) {
    const MemoryAccess& a = step[lane];
    if (a.is_noop()) continue;
    const std::uint64_t base = a.address & mask;
    const std::uint64_t bit = std::uint64_t{1} << (lane & 63);
    if (coalescing) {
      auto it = std::find_if(out.begin(), out.end(), [&](const Transaction& t) {
        return t.segment_base == base && t.kind == a.kind;
      });
      if (it != out.end()) {
        it->lane_mask |= bit;
        continue;
      }
    }
    Transaction t;
    t.segment_base = base;
    t.kind = a.kind;
    t.array_tag = a.array_tag;
    t.lane_mask = bit;
    out.push_back(t);
  }
  std::stable_sort(out.begin(), out.end(), [](const Transaction& x, const Transaction& y) {
    return x.segment_base < y.segment_base;
  });
}

std::vector<Transaction> coalesce_warp(std::span<const MemoryAccess> step, std::uint32_t segment_size,
                                       bool coalescing) {
  std::vector<Transaction> out;
  coalesce_warp_into(step, segment_size, coalescing, out);
  return out;
}

namespace {

struct WarpSlot {
  std::uint64_t block = 0;
  std::uint64_t warp = 0;
  std::uint32_t step = 0;
  std::uint32_t steps = 0;
};

struct SmState {
  std::vector<WarpSlot> slots;
  // (block, warps still running)
  std::vector<std::pair<std::uint64_t, std::uint32_t>> live_blocks;
  std::size_t cursor = 0;
  std::uint64_t next_block = 0;
};

class Scheduler {
 public:
  Scheduler(const GpuKernel& kernel, const ExecModelConfig& cfg)
      : kernel_(kernel),
        cfg_(cfg),
        threads_(kernel.thread_count()),
        blocks_((threads_ + cfg.threads_per_block - 1) / cfg.threads_per_block),
        sms_(cfg.num_sms),
        lanes_(cfg.warp_size) {
    for (std::uint32_t s = 0; s < cfg_.num_sms; ++s) {
      sms_[s].next_block = s;
      admit(sms_[s]);
    }
  }

  InterleaveStats run(const TransactionSink& sink, const AccessSink& raw) {
    InterleaveStats stats;
    bool busy = true;
    while (busy) {
      busy = false;
      for (std::uint32_t s = 0; s < sms_.size(); ++s) {
        SmState& sm = sms_[s];
        if (sm.slots.empty()) continue;
        busy = true;
        issue(sm, s, stats, sink, raw);
      }
    }
    return stats;
  }

 private:
  void admit(SmState& sm) {
    const std::uint32_t limit = cfg_.resident_blocks();
    while (sm.live_blocks.size() < limit && sm.next_block < blocks_) {
      const std::uint64_t block = sm.next_block;
      sm.next_block += cfg_.num_sms;
      std::uint32_t added = 0;
      for (std::uint32_t w = 0; w < cfg_.warps_per_block(); ++w) {
        const std::uint64_t warp = block * cfg_.warps_per_block() + w;
        const std::uint64_t first = warp * cfg_.warp_size;
        if (first >= threads_) break;
        const std::uint32_t steps = kernel_.step_count(first);
        if (steps == 0) continue;
        sm.slots.push_back(WarpSlot{block, warp, 0, steps});
        ++added;
      }
      if (added > 0) sm.live_blocks.emplace_back(block, added);
    }
  }

  void issue(SmState& sm, std::uint32_t sm_index, InterleaveStats& stats, const TransactionSink& sink,
             const AccessSink& raw) {
    WarpSlot& slot = sm.slots[sm.cursor];
    const std::uint64_t first = slot.warp * cfg_.warp_size;
    for (std::uint32_t lane = 0; lane < cfg_.warp_size; ++lane) {
      const std::uint64_t t = first + lane;
      MemoryAccess a = t < threads_ ? kernel_.access(t, slot.step) : MemoryAccess::noop(0);
      lanes_[lane] = a;
      if (!a.is_noop()) {
        ++stats.accesses;
        if (raw) raw(a);
      }
    }
    coalesce_warp_into(lanes_, cfg_.segment_size, cfg_.coalescing, txs_);
    for (Transaction& tx : txs_) {
      tx.sm = sm_index;
      tx.warp = slot.warp;
      sink(tx);
    }
    stats.transactions += txs_.size();
    ++stats.warp_steps;

    if (++slot.step < slot.steps) {
      sm.cursor = (sm.cursor + 1) % sm.slots.size();
      return;
    }
    const std::uint64_t block = slot.block;
    sm.slots.erase(sm.slots.begin() + static_cast<std::ptrdiff_t>(sm.cursor));
    auto live = std::find_if(sm.live_blocks.begin(), sm.live_blocks.end(),
                             [&](const auto& b) { return b.first == block; });
    if (--live->second == 0) {
      sm.live_blocks.erase(live);
      admit(sm);
    }
    if (sm.cursor >= sm.slots.size()) sm.cursor = 0;
  }

  const GpuKernel& kernel_;
  const ExecModelConfig& cfg_;
  std::uint64_t threads_;
  std::uint64_t blocks_;
  std::vector<SmState> sms_;
  std::vector<MemoryAccess> lanes_;
  std::vector<Transaction> txs_;
};

class TraceKernel final : public GpuKernel {
 public:
  TraceKernel(std::vector<ThreadTrace> threads, std::uint32_t warp_size)
      : threads_(std::move(threads)), warp_size_(warp_size) {
    std::stable_sort(threads_.begin(), threads_.end(),
                     [](const ThreadTrace& a, const ThreadTrace& b) { return a.thread_id < b.thread_id; });
  }

  std::string_view name() const noexcept override { return "explicit-traces"; }
  std::uint64_t thread_count() const noexcept override { return threads_.size(); }

  std::uint32_t step_count(std::uint64_t first_thread) const noexcept override {
    std::size_t steps = 0;
    const std::uint64_t end = std::min<std::uint64_t>(first_thread + warp_size_, threads_.size());
    for (std::uint64_t t = first_thread; t < end; ++t) steps = std::max(steps, threads_[t].steps.size());
    return static_cast<std::uint32_t>(steps);
  }

  MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept override {
    const ThreadTrace& tt = threads_[thread];
    return step < tt.steps.size() ? tt.steps[step] : MemoryAccess::noop(tt.thread_id);
  }

 private:
  std::vector<ThreadTrace> threads_;
  std::uint32_t warp_size_;
};

}  // namespace

InterleaveStats interleave_grid(const GpuKernel& kernel, const ExecModelConfig& cfg, const TransactionSink& sink,
                                const AccessSink& raw) {
  validate(cfg);
  Scheduler scheduler(kernel, cfg);
  return scheduler.run(sink, raw);
}

std::vector<ThreadTrace> pad_to_warps(std::vector<ThreadTrace> threads, std::uint32_t warp_size) {
  std::stable_sort(threads.begin(), threads.end(),
                   [](const ThreadTrace& a, const ThreadTrace& b) { return a.thread_id < b.thread_id; });
  for (std::size_t first = 0; first < threads.size(); first += warp_size) {
    const std::size_t end = std::min<std::size_t>(first + warp_size, threads.size());
    std::size_t longest = 0;
    for (std::size_t t = first; t < end; ++t) longest = std::max(longest, threads[t].steps.size());
    for (std::size_t t = first; t < end; ++t) {
      threads[t].steps.resize(longest, MemoryAccess::noop(threads[t].thread_id));
    }
  }
  return threads;
}

std::vector<Transaction> interleave_grid(std::span<const ThreadTrace> threads, const ExecModelConfig& cfg) {
  validate(cfg);
  std::vector<ThreadTrace> sorted(threads.begin(), threads.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ThreadTrace& a, const ThreadTrace& b) { return a.thread_id < b.thread_id; });
  for (std::size_t first = 0; first < sorted.size(); first += cfg.warp_size) {
    const std::size_t end = std::min<std::size_t>(first + cfg.warp_size, sorted.size());
    for (std::size_t t = first + 1; t < end; ++t) {
      if (sorted[t].steps.size() != sorted[first].steps.size()) {
        throw SimError(ErrorCode::RAGGED_TRACE,
                       "warp " + std::to_string(first / cfg.warp_size) + ": thread " +
                           std::to_string(sorted[t].thread_id) + " has " + std::to_string(sorted[t].steps.size()) +
                           " steps, thread " + std::to_string(sorted[first].thread_id) + " has " +
                           std::to_string(sorted[first].steps.size()));
      }
    }
  }
  TraceKernel kernel(std::move(sorted), cfg.warp_size);
  std::vector<Transaction> out;
  interleave_grid(kernel, cfg, [&](const Transaction& t) { out.push_back(t); });
  return out;
}

KernelPtr make_trace_kernel(std::vector<ThreadTrace> threads, std::uint32_t warp_size) {
  return std::make_shared<TraceKernel>(std::move(threads), warp_size);
}

std::vector<ThreadTrace> materialize(const GpuKernel& kernel, std::uint32_t warp_size) {
  std::vector<ThreadTrace> out(kernel.thread_count());
  for (std::uint64_t t = 0; t < out.size(); ++t) {
    out[t].thread_id = static_cast<std::uint32_t>(t);
    const std::uint32_t steps = kernel.step_count(t / warp_size * warp_size);
    out[t].steps.reserve(steps);
    for (std::uint32_t s = 0; s < steps; ++s) out[t].steps.push_back(kernel.access(t, s));
  }
  return out;
}

Trace apply_scratchpad(std::span<const MemoryAccess> tile_loads, std::uint64_t reuse_count,
                       std::uint64_t shared_capacity_bytes) {
  (void)reuse_count;  // reuses are served on chip and generate no traffic
  std::uint64_t bytes = 0;
  for (const MemoryAccess& a : tile_loads) bytes += a.size;
  if (bytes > shared_capacity_bytes) {
    throw SimError(ErrorCode::TILE_TOO_LARGE, "tile needs " + std::to_string(bytes) + " bytes, shared memory has " +
                                                  std::to_string(shared_capacity_bytes));
  }
  return Trace(tile_loads.begin(), tile_loads.end());
}

}  // namespace cachesim
