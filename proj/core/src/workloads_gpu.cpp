#include <memory>
#include <string>

#include "cachesim/error.hpp"
#include "cachesim/workloads.hpp"
#include "workloads_internal.hpp"

namespace cachesim {

namespace {

// Dense 2D launch covering a rows x cols output with block_dim_x-wide blocks.
class Grid2D {
 public:
  Grid2D(std::uint64_t rows, std::uint64_t cols, const ExecModelConfig& exec)
      : rows_(rows),
        cols_(cols),
        bx_(exec.block_dim_x),
        by_(exec.block_dim_y()),
        tpb_(exec.threads_per_block),
        blocks_x_((cols + bx_ - 1) / bx_),
        blocks_y_((rows + by_ - 1) / by_) {}

  std::uint64_t threads() const noexcept { return blocks_x_ * blocks_y_ * tpb_; }

  struct Coord {
    std::uint64_t row;
    std::uint64_t col;
    std::uint32_t ty;
    std::uint32_t tx;
  };

  // False for threads of partial blocks that fall outside the matrix.
  bool locate(std::uint64_t thread, Coord& c) const noexcept {
    const std::uint64_t block = thread / tpb_;
    const std::uint64_t local = thread % tpb_;
    c.ty = static_cast<std::uint32_t>(local / bx_);
    c.tx = static_cast<std::uint32_t>(local % bx_);
    c.row = (block / blocks_x_) * by_ + c.ty;
    c.col = (block % blocks_x_) * bx_ + c.tx;
    return c.row < rows_ && c.col < cols_;
  }

 private:
  std::uint64_t rows_;
  std::uint64_t cols_;
  std::uint64_t bx_;
  std::uint64_t by_;
  std::uint64_t tpb_;
  std::uint64_t blocks_x_;
  std::uint64_t blocks_y_;
};

inline MemoryAccess load(std::uint64_t thread, std::uint64_t address, std::uint32_t es, std::uint8_t tag) {
  return MemoryAccess{address, static_cast<std::uint32_t>(thread), static_cast<std::uint8_t>(es), AccessKind::READ, tag};
}

inline MemoryAccess store(std::uint64_t thread, std::uint64_t address, std::uint32_t es, std::uint8_t tag) {
  return MemoryAccess{address, static_cast<std::uint32_t>(thread), static_cast<std::uint8_t>(es), AccessKind::WRITE,
                      tag};
}

struct MatrixBases {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
};

MatrixBases place_matmul(std::uint64_t n, const GenOptions& opt) {
  AddressPlanner planner(opt.bases);
  const std::uint64_t bytes = n * n * opt.element_size;
  MatrixBases m;
  m.a = planner.place("A", bytes);
  m.b = planner.place("B", bytes);
  m.c = planner.place("C", bytes);
  return m;
}

// One thread per C element walking k in order: A[i][k], B[k][j] per step
// pair, then one C store.
class MatmulKernel final : public GpuKernel {
 public:
  MatmulKernel(std::uint64_t n, bool b_transposed, const GenOptions& opt)
      : n_(n), es_(opt.element_size), transposed_(b_transposed), grid_(n, n, opt.exec), m_(place_matmul(n, opt)) {}

  std::string_view name() const noexcept override { return transposed_ ? "matmul-transposed" : "matmul"; }
  std::uint64_t thread_count() const noexcept override { return grid_.threads(); }
  std::uint32_t step_count(std::uint64_t) const noexcept override { return static_cast<std::uint32_t>(2 * n_ + 1); }

  MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept override {
    Grid2D::Coord c;
    if (!grid_.locate(thread, c)) return MemoryAccess::noop(static_cast<std::uint32_t>(thread));
    if (step == 2 * n_) return store(thread, m_.c + (c.row * n_ + c.col) * es_, es_, tags::C);
    const std::uint64_t k = step / 2;
    if (step % 2 == 0) return load(thread, m_.a + (c.row * n_ + k) * es_, es_, tags::A);
    const std::uint64_t b = transposed_ ? m_.b + (c.col * n_ + k) * es_ : m_.b + (k * n_ + c.col) * es_;
    return load(thread, b, es_, tags::B);
  }

 private:
  std::uint64_t n_;
  std::uint32_t es_;
  bool transposed_;
  Grid2D grid_;
  MatrixBases m_;
};

// Tiled multiply staged through shared memory. Per k-tile, thread (ty, tx)
// of the block loads A[row][kt*b + tx] and B[kt*b + ty][col]; the b-fold
// reuse of every staged element is served on chip.
class SharedTileMatmulKernel final : public GpuKernel {
 public:
  SharedTileMatmulKernel(std::uint64_t n, std::uint64_t b, const GenOptions& opt)
      : n_(n), b_(b), es_(opt.element_size), grid_(n, n, opt.exec), m_(place_matmul(n, opt)) {
    // The first tile of block 0 stands for all of them: same shape, same size.
    Trace tile;
    tile.reserve(2 * b * b);
    for (std::uint64_t t = 0; t < b * b; ++t) {
      tile.push_back(access(t, 0));
      tile.push_back(access(t, 1));
    }
    apply_scratchpad(tile, b, opt.shared_memory_bytes);
  }

  std::string_view name() const noexcept override { return "matmul-shared-tiles"; }
  std::uint64_t thread_count() const noexcept override { return grid_.threads(); }
  std::uint32_t step_count(std::uint64_t) const noexcept override {
    return static_cast<std::uint32_t>(2 * (n_ / b_) + 1);
  }

  MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept override {
    Grid2D::Coord c;
    if (!grid_.locate(thread, c)) return MemoryAccess::noop(static_cast<std::uint32_t>(thread));
    if (step == 2 * (n_ / b_)) return store(thread, m_.c + (c.row * n_ + c.col) * es_, es_, tags::C);
    const std::uint64_t k0 = (step / 2) * b_;
    if (step % 2 == 0) return load(thread, m_.a + (c.row * n_ + k0 + c.tx) * es_, es_, tags::A);
    return load(thread, m_.b + ((k0 + c.ty) * n_ + c.col) * es_, es_, tags::B);
  }

 private:
  std::uint64_t n_;
  std::uint64_t b_;
  std::uint32_t es_;
  Grid2D grid_;
  MatrixBases m_;
};

struct FusionBases {
  std::uint64_t x, y, z, w;
};

// Thread i: read X[i], read Y[i], write the private output; the fused form
// does both bodies back to back.
class FusionKernel final : public GpuKernel {
 public:
  enum class Part { FIRST, SECOND, FUSED };

  FusionKernel(std::uint64_t n, Part part, std::uint32_t es, FusionBases bases)
      : n_(n), part_(part), es_(es), bases_(bases) {}

  std::string_view name() const noexcept override {
    switch (part_) {
      case Part::FIRST: return "fusion-kernel1";
      case Part::SECOND: return "fusion-kernel2";
      case Part::FUSED: return "fusion-fused";
    }
    return "fusion";
  }
  std::uint64_t thread_count() const noexcept override { return n_; }
  std::uint32_t step_count(std::uint64_t) const noexcept override { return part_ == Part::FUSED ? 6 : 3; }

  MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept override {
    const std::uint64_t off = thread * es_;
    const bool second = part_ == Part::SECOND || (part_ == Part::FUSED && step >= 3);
    switch (step % 3) {
      case 0: return load(thread, bases_.x + off, es_, tags::X);
      case 1: return load(thread, bases_.y + off, es_, tags::Y);
      default:
        return second ? store(thread, bases_.w + off, es_, tags::W) : store(thread, bases_.z + off, es_, tags::Z);
    }
  }

 private:
  std::uint64_t n_;
  Part part_;
  std::uint32_t es_;
  FusionBases bases_;
};

// Thread t touches index t * stride of a, b and c (read, read, write).
class MergeKernel final : public GpuKernel {
 public:
  MergeKernel(std::uint64_t n, std::uint64_t stride, bool merged, const GenOptions& opt)
      : threads_((n + stride - 1) / stride), stride_(stride), es_(opt.element_size) {
    layout_.element_size = es_;
    AddressPlanner planner(opt.bases);
    if (merged) {
      layout_.kind = LayoutKind::MERGED_AOS;
      layout_.arrays = 3;
      base_[0] = base_[1] = base_[2] = planner.place("abc", 3 * n * es_);
    } else {
      base_[0] = planner.place("a", n * es_);
      base_[1] = planner.place("b", n * es_);
      base_[2] = planner.place("c", n * es_);
    }
  }

  std::string_view name() const noexcept override {
    return layout_.kind == LayoutKind::MERGED_AOS ? "merge-merged" : "merge-unmerged";
  }
  std::uint64_t thread_count() const noexcept override { return threads_; }
  std::uint32_t step_count(std::uint64_t) const noexcept override { return 3; }

  MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept override {
    const std::uint64_t i = thread * stride_;
    const std::uint64_t addr = layout_.address(base_[step], i, step);
    return step == 2 ? store(thread, addr, es_, 2) : load(thread, addr, es_, static_cast<std::uint8_t>(step));
  }

 private:
  std::uint64_t threads_;
  std::uint64_t stride_;
  std::uint32_t es_;
  LayoutMap layout_;
  std::uint64_t base_[3] = {0, 0, 0};
};

// Thread (row, col) reads both block-linear inputs and writes a row-major
// output element.
class TextureKernel final : public GpuKernel {
 public:
  TextureKernel(std::uint64_t n, bool merged, const GenOptions& opt)
      : n_(n), es_(opt.element_size), merged_(merged), grid_(n, n, opt.exec) {
    layout_ = LayoutMap{LayoutKind::TILED_2D, opt.tile_edge, merged ? 2u : 1u, es_};
    AddressPlanner planner(opt.bases);
    const std::uint64_t bytes = n * n * es_;
    if (merged) {
      in_[0] = in_[1] = planner.place("TAB", 2 * bytes);
    } else {
      in_[0] = planner.place("TA", bytes);
      in_[1] = planner.place("TB", bytes);
    }
    out_ = planner.place("OUT", bytes);
  }

  std::string_view name() const noexcept override { return merged_ ? "texture-merged" : "texture-unmerged"; }
  std::uint64_t thread_count() const noexcept override { return grid_.threads(); }
  std::uint32_t step_count(std::uint64_t) const noexcept override { return 3; }

  MemoryAccess access(std::uint64_t thread, std::uint32_t step) const noexcept override {
    Grid2D::Coord c;
    if (!grid_.locate(thread, c)) return MemoryAccess::noop(static_cast<std::uint32_t>(thread));
    if (step == 2) return store(thread, out_ + (c.row * n_ + c.col) * es_, es_, 2);
    const std::uint32_t which = merged_ ? step : 0;
    return load(thread, layout_.address(in_[step], c.row, c.col, n_, which), es_, static_cast<std::uint8_t>(step));
  }

 private:
  std::uint64_t n_;
  std::uint32_t es_;
  bool merged_;
  Grid2D grid_;
  LayoutMap layout_;
  std::uint64_t in_[2] = {0, 0};
  std::uint64_t out_ = 0;
};

}  // namespace

namespace detail {

GpuWorkload gpu_matmul(std::uint64_t n, bool b_transposed, const GenOptions& opt) {
  auto k = std::make_shared<MatmulKernel>(n, b_transposed, opt);
  return GpuWorkload{std::string(k->name()), {k}};
}

GpuWorkload gpu_matmul_shared(std::uint64_t n, std::uint64_t b, const GenOptions& opt) {
  if (opt.exec.block_dim_x != b || opt.exec.block_dim_y() != b) {
    throw SimError(ErrorCode::VALIDATION_ERROR,
                   "SHARED_TILES needs a " + std::to_string(b) + "x" + std::to_string(b) + " thread block, got " +
                       std::to_string(opt.exec.block_dim_x) + "x" + std::to_string(opt.exec.block_dim_y()));
  }
  auto k = std::make_shared<SharedTileMatmulKernel>(n, b, opt);
  return GpuWorkload{std::string(k->name()), {k}};
}

GpuWorkload gpu_array_merge(std::uint64_t n, bool merged, const GenOptions& opt) {
  const std::uint64_t stride = opt.stride == 0 ? 64 : opt.stride;
  auto k = std::make_shared<MergeKernel>(n, stride, merged, opt);
  return GpuWorkload{std::string(k->name()), {k}};
}

}  // namespace detail

GpuWorkload gen_kernel_fusion(std::uint64_t n, bool fused, const GenOptions& opt) {
  const std::uint32_t es = opt.element_size;
  AddressPlanner planner(opt.bases);
  FusionBases bases{};
  bases.x = planner.place("X", n * es);
  bases.y = planner.place("Y", n * es);
  bases.z = planner.place("Z", n * es);
  bases.w = planner.place("W", n * es);
  using Part = FusionKernel::Part;
  if (fused) return GpuWorkload{"kernel-fused", {std::make_shared<FusionKernel>(n, Part::FUSED, es, bases)}};
  return GpuWorkload{"kernel-separate",
                     {std::make_shared<FusionKernel>(n, Part::FIRST, es, bases),
                      std::make_shared<FusionKernel>(n, Part::SECOND, es, bases)}};
}

GpuWorkload gen_texture_merge(std::uint64_t n, bool merged, const GenOptions& opt) {
  if (opt.tile_edge == 0 || n % opt.tile_edge != 0) {
    throw SimError(ErrorCode::SIZE_MISMATCH,
                   "n = " + std::to_string(n) + " is not a multiple of tile edge " + std::to_string(opt.tile_edge));
  }
  auto k = std::make_shared<TextureKernel>(n, merged, opt);
  return GpuWorkload{std::string(k->name()), {k}};
}

}  // namespace cachesim
