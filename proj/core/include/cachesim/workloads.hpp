#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cachesim/cache_model.hpp"
#include "cachesim/gpu_exec.hpp"
#include "cachesim/types.hpp"
#include "cachesim/workload_spec.hpp"

namespace cachesim {

// ---------------------------------------------------------------------------
// Layouts

enum class LayoutKind : std::uint8_t { ROW_MAJOR, TRANSPOSED, MERGED_AOS, TILED_2D };

// Maps logical element coordinates to byte addresses.
//
// MERGED_AOS interleaves `arrays` one-dimensional arrays element by element:
// element i of array j sits at (i * arrays + j) * element_size.
// TILED_2D stores tile_edge x tile_edge tiles in row-major tile order, each
// tile row-major inside; with arrays > 1 the arrays' tiles alternate, so tile
// t of array j is tile number t * arrays + j.
struct LayoutMap {
  LayoutKind kind = LayoutKind::ROW_MAJOR;
  std::uint32_t tile_edge = 4;
  std::uint32_t arrays = 1;
  std::uint32_t element_size = 8;

  // Element (row, col) of an n x n matrix.
  std::uint64_t address(std::uint64_t base, std::uint64_t row, std::uint64_t col, std::uint64_t n,
                        std::uint32_t array = 0) const noexcept;
  // Element i of a one-dimensional array.
  std::uint64_t address(std::uint64_t base, std::uint64_t i, std::uint32_t array = 0) const noexcept;
};

// Block-linear address of (row, col). Throws SimError(SIZE_MISMATCH) when
// tile_edge does not divide n and SimError(OUT_OF_RANGE) for coordinates
// outside the matrix.
std::uint64_t tile_address_map(std::uint64_t row, std::uint64_t col, std::uint64_t n, std::uint32_t tile_edge,
                               std::uint32_t element_size, std::uint64_t base);

// Hands out array base addresses: consecutive regions aligned to 4KB with at
// least one guard line between them, unless a base is overridden by name.
class AddressPlanner {
 public:
  static constexpr std::uint64_t kDefaultFirstBase = 0x1000'0000;
  static constexpr std::uint64_t kGuardBytes = 128;
  static constexpr std::uint64_t kAlignment = 4096;

  explicit AddressPlanner(std::map<std::string, std::uint64_t> overrides = {},
                          std::uint64_t first_base = kDefaultFirstBase);

  std::uint64_t place(std::string_view name, std::uint64_t bytes);

 private:
  std::map<std::string, std::uint64_t> overrides_;
  std::uint64_t cursor_;
};

// ---------------------------------------------------------------------------
// Generated workloads

struct GenOptions {
  std::uint32_t element_size = 8;
  std::map<std::string, std::uint64_t> bases;
  // Thread-block shape and warp size for GPU kernels.
  ExecModelConfig exec;
  // Shared memory available to one block (SHARED_TILES only).
  std::uint64_t shared_memory_bytes = 48 * KiB;
  // Merge stride in elements; 0 selects 16 (CPU) or 64 (GPU).
  std::uint64_t stride = 0;
  std::uint32_t tile_edge = 4;
};

// A sequential program: `emit` replays the trace into a sink, so large
// traces never have to be materialized.
struct CpuWorkload {
  std::string name;
  std::uint64_t length = 0;
  std::function<void(const AccessSink&)> emit;
};

// One or more kernel launches run back to back on persistent caches.
struct GpuWorkload {
  std::string name;
  std::vector<KernelPtr> launches;

  std::uint64_t access_count() const;
};

using Workload = std::variant<CpuWorkload, GpuWorkload>;

Trace collect(const CpuWorkload& w);
// Per-thread traces of every launch, in launch order.
std::vector<std::vector<ThreadTrace>> collect(const GpuWorkload& w);

// Array tags used for per-array attribution.
namespace tags {
inline constexpr std::uint8_t A = 0, B = 1, C = 2, BT = 3;
inline constexpr std::uint8_t X = 0, Y = 1, Z = 2, W = 3;
}  // namespace tags

// i-j-k matrix multiply; one C write per element.
Workload gen_matmul_naive(std::uint64_t n, Platform platform, const GenOptions& opt = {});

// HP_BLOCKS: jj/kk outer loops, full i sweep over a b-wide strip of B
// (1 x b pieces of A, b x b blocks of B). EQUAL_TILES: b x b tiles of A, B
// and C. SHARED_TILES (GPU): cooperative tile loads into shared memory.
// Partial sums of C are read back for every k-block after the first.
// Throws SimError(BLOCK_MISMATCH) when b does not divide n.
Workload gen_matmul_blocked(std::uint64_t n, std::uint64_t b, Variant variant, Platform platform,
                            const GenOptions& opt = {});

// Two loops over X, Y with private outputs Z and W, separate or fused.
CpuWorkload gen_loop_fusion(std::uint64_t n, bool fused, const GenOptions& opt = {});
// Kernel analogue of gen_loop_fusion: two launches, or one fused launch.
GpuWorkload gen_kernel_fusion(std::uint64_t n, bool fused, const GenOptions& opt = {});

// Strided read a, read b, write c over three arrays, optionally merged into
// one array of structures. CPU visits 0, s, 2s, ...; on the GPU thread t
// handles index t * s.
Workload gen_array_merge(std::uint64_t n, bool merged, Platform platform, const GenOptions& opt = {});

// Two n x n block-linear (texture-like) inputs read per thread and a linear
// output; merged interleaves the inputs tile by tile.
GpuWorkload gen_texture_merge(std::uint64_t n, bool merged, const GenOptions& opt = {});

// Matrix multiply reading B row-major (column walk) or pre-transposed.
Workload gen_transpose_matmul(std::uint64_t n, bool transposed, Platform platform, const GenOptions& opt = {});
// Host-side transpose: read B sequentially, write B^T; 2n^2 accesses.
CpuWorkload gen_transpose_overhead(std::uint64_t n, const GenOptions& opt = {});

// Throws SimError (BLOCK_MISMATCH, SIZE_MISMATCH, VALIDATION_ERROR).
void validate(const WorkloadSpec& spec);
GenOptions gen_options_for(const WorkloadSpec& spec);
Workload make_workload(const WorkloadSpec& spec, const GenOptions& opt);

}  // namespace cachesim
