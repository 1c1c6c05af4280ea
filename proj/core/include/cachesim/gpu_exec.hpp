#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cachesim/types.hpp"

namespace cachesim {

enum class Scheduling : std::uint8_t { ROUND_ROBIN_WARP };

struct ExecModelConfig {
  std::uint32_t warp_size = 32;
  std::uint32_t threads_per_block = 256;
  // Width of a 2D thread block; height is threads_per_block / block_dim_x.
  std::uint32_t block_dim_x = 16;
  std::uint32_t num_sms = 1;
  // Must equal the line size of the first enabled cache level.
  std::uint32_t segment_size = 128;
  Scheduling scheduling = Scheduling::ROUND_ROBIN_WARP;
  bool coalescing = true;
  // Warps an SM keeps in flight (Fermi: 48). Blocks are admitted whole.
  std::uint32_t max_resident_warps = 48;

  std::uint32_t block_dim_y() const noexcept { return threads_per_block / block_dim_x; }
  std::uint32_t warps_per_block() const noexcept { return threads_per_block / warp_size; }
  std::uint32_t resident_blocks() const noexcept;

  friend bool operator==(const ExecModelConfig&, const ExecModelConfig&) = default;
};

// Throws SimError(VALIDATION_ERROR).
void validate(const ExecModelConfig& cfg);

struct ThreadTrace {
  std::uint32_t thread_id = 0;
  std::vector<MemoryAccess> steps;

  friend bool operator==(const ThreadTrace&, const ThreadTrace&) = default;
};

// One segment-sized request issued for a warp step. Lanes index the
// accesses of the step as they were presented to the coalescer.
struct Transaction {
  std::uint64_t segment_base = 0;
  AccessKind kind = AccessKind::READ;
  std::uint8_t array_tag = 0;
  std::uint32_t sm = 0;
  std::uint64_t warp = 0;
  std::uint64_t lane_mask = 0;

  std::uint32_t lane_count() const noexcept;
  // Thread ids of the contributing lanes, given the ids of the warp's lanes.
  std::vector<std::uint32_t> contributing_threads(std::span<const std::uint32_t> lane_threads) const;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

using TransactionSink = std::function<void(const Transaction&)>;

// One transaction per distinct (segment, kind) touched, ascending by
// segment; without coalescing, one per access. Padding steps are skipped.
std::vector<Transaction> coalesce_warp(std::span<const MemoryAccess> step, std::uint32_t segment_size,
                                       bool coalescing = true);
// Allocation-free form used on the hot path; `out` is cleared first.
void coalesce_warp_into(std::span<const MemoryAccess> step, std::uint32_t segment_size, bool coalescing,
                        std::vector<Transaction>& out);

// Per-thread access source for one kernel launch. Threads are numbered
// densely from 0; a block is threads_per_block consecutive ids.
class GpuKernel {
 public:
  virtual ~GpuKernel() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual std::uint64_t thread_count() const noexcept = 0;
  // Steps issued by the warp whose lane 0 is `first_thread`.
  virtual std::uint32_t step_count(std::uint64_t first_thread) const noexcept = 0;
  // Access of a thread at a step; MemoryAccess::noop for idle lanes.
  virtual MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept = 0;
};

using KernelPtr = std::shared_ptr<const GpuKernel>;

struct InterleaveStats {
  std::uint64_t accesses = 0;
  std::uint64_t transactions = 0;
  std::uint64_t warp_steps = 0;
};

// Round-robin warp scheduler: warps issue one step per turn among the
// resident warps of their SM, blocks are dealt to SMs round-robin, and SM
// streams interleave one warp step at a time. `raw` (optional) sees every
// thread access in issue order.
InterleaveStats interleave_grid(const GpuKernel& kernel, const ExecModelConfig& cfg,
                                const TransactionSink& sink, const AccessSink& raw = {});

// Pads every warp's threads to the longest trace in that warp.
std::vector<ThreadTrace> pad_to_warps(std::vector<ThreadTrace> threads, std::uint32_t warp_size);

// Throws SimError(RAGGED_TRACE) when a warp's threads differ in length.
std::vector<Transaction> interleave_grid(std::span<const ThreadTrace> threads, const ExecModelConfig& cfg);

// Wraps explicit per-thread traces as a kernel (threads sorted by id).
KernelPtr make_trace_kernel(std::vector<ThreadTrace> threads, std::uint32_t warp_size);

// Expands a kernel into explicit per-thread traces; for small launches.
std::vector<ThreadTrace> materialize(const GpuKernel& kernel, std::uint32_t warp_size = 32);

// Shared memory as traffic elision: the tile loads go through the memory
// system once and the `reuse_count` reads of each element that follow are
// served on chip. Throws SimError(TILE_TOO_LARGE) when the tile does not fit.
Trace apply_scratchpad(std::span<const MemoryAccess> tile_loads, std::uint64_t reuse_count,
                       std::uint64_t shared_capacity_bytes);

}  // namespace cachesim
