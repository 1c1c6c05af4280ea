#include <string>

#include "cachesim/error.hpp"
#include "cachesim/workloads.hpp"
#include "workloads_internal.hpp"

namespace cachesim {

namespace {

class Emitter {
 public:
  Emitter(const AccessSink& sink, std::uint32_t element_size)
      : sink_(sink), size_(static_cast<std::uint8_t>(element_size)) {}

  void read(std::uint64_t address, std::uint8_t tag) const {
    sink_(MemoryAccess{address, 0, size_, AccessKind::READ, tag});
  }
  void write(std::uint64_t address, std::uint8_t tag) const {
    sink_(MemoryAccess{address, 0, size_, AccessKind::WRITE, tag});
  }

 private:
  const AccessSink& sink_;
  std::uint8_t size_;
};

struct MatmulArrays {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
};

MatmulArrays place_matmul(std::uint64_t n, const GenOptions& opt) {
  AddressPlanner planner(opt.bases);
  const std::uint64_t bytes = n * n * opt.element_size;
  MatmulArrays m;
  m.a = planner.place("A", bytes);
  m.b = planner.place("B", bytes);
  m.c = planner.place("C", bytes);
  return m;
}

// Inner product over k in [k0, k1) for one C element, then the C update.
// The first k-block writes C outright, later ones read the partial sum back.
inline void matmul_cell(const Emitter& e, const MatmulArrays& m, std::uint64_t n, std::uint32_t es, std::uint64_t i,
                        std::uint64_t j, std::uint64_t k0, std::uint64_t k1, bool b_transposed) {
  for (std::uint64_t k = k0; k < k1; ++k) {
    e.read(m.a + (i * n + k) * es, tags::A);
    e.read(b_transposed ? m.b + (j * n + k) * es : m.b + (k * n + j) * es, tags::B);
  }
  const std::uint64_t c = m.c + (i * n + j) * es;
  if (k0 > 0) e.read(c, tags::C);
  e.write(c, tags::C);
}

}  // namespace

namespace detail {

CpuWorkload cpu_matmul(std::uint64_t n, bool b_transposed, const GenOptions& opt) {
  const MatmulArrays m = place_matmul(n, opt);
  const std::uint32_t es = opt.element_size;
  CpuWorkload w;
  w.name = b_transposed ? "matmul-transposed" : "matmul-naive";
  w.length = 2 * n * n * n + n * n;
  w.emit = [=](const AccessSink& sink) {
    const Emitter e(sink, es);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::uint64_t j = 0; j < n; ++j) matmul_cell(e, m, n, es, i, j, 0, n, b_transposed);
    }
  };
  return w;
}

CpuWorkload cpu_matmul_blocked(std::uint64_t n, std::uint64_t b, Variant variant, const GenOptions& opt) {
  const MatmulArrays m = place_matmul(n, opt);
  const std::uint32_t es = opt.element_size;
  const std::uint64_t kblocks = n / b;
  CpuWorkload w;
  w.length = 2 * n * n * n + n * n * kblocks + n * n * (kblocks - 1);
  if (variant == Variant::HP_BLOCKS) {
    w.name = "matmul-hp-blocks";
    w.emit = [=](const AccessSink& sink) {
      const Emitter e(sink, es);
      for (std::uint64_t jj = 0; jj < n; jj += b) {
        for (std::uint64_t kk = 0; kk < n; kk += b) {
          for (std::uint64_t i = 0; i < n; ++i) {
            for (std::uint64_t j = jj; j < jj + b; ++j) matmul_cell(e, m, n, es, i, j, kk, kk + b, false);
          }
        }
      }
    };
  } else {
    w.name = "matmul-equal-tiles";
    w.emit = [=](const AccessSink& sink) {
      const Emitter e(sink, es);
      for (std::uint64_t ii = 0; ii < n; ii += b) {
        for (std::uint64_t jj = 0; jj < n; jj += b) {
          for (std::uint64_t kk = 0; kk < n; kk += b) {
            for (std::uint64_t i = ii; i < ii + b; ++i) {
              for (std::uint64_t j = jj; j < jj + b; ++j) matmul_cell(e, m, n, es, i, j, kk, kk + b, false);
            }
          }
        }
      }
    };
  }
  return w;
}

CpuWorkload cpu_array_merge(std::uint64_t n, bool merged, const GenOptions& opt) {
  const std::uint32_t es = opt.element_size;
  const std::uint64_t stride = opt.stride == 0 ? 16 : opt.stride;
  AddressPlanner planner(opt.bases);
  std::uint64_t base[3];
  LayoutMap layout;
  layout.element_size = es;
  if (merged) {
    layout.kind = LayoutKind::MERGED_AOS;
    layout.arrays = 3;
    const std::uint64_t b = planner.place("abc", 3 * n * es);
    base[0] = base[1] = base[2] = b;
  } else {
    base[0] = planner.place("a", n * es);
    base[1] = planner.place("b", n * es);
    base[2] = planner.place("c", n * es);
  }
  CpuWorkload w;
  w.name = merged ? "merge-merged" : "merge-unmerged";
  w.length = 3 * ((n + stride - 1) / stride);
  w.emit = [=](const AccessSink& sink) {
    const Emitter e(sink, es);
    for (std::uint64_t i = 0; i < n; i += stride) {
      e.read(layout.address(base[0], i, 0), 0);
      e.read(layout.address(base[1], i, 1), 1);
      e.write(layout.address(base[2], i, 2), 2);
    }
  };
  return w;
}

}  // namespace detail

CpuWorkload gen_loop_fusion(std::uint64_t n, bool fused, const GenOptions& opt) {
  const std::uint32_t es = opt.element_size;
  AddressPlanner planner(opt.bases);
  const std::uint64_t x = planner.place("X", n * es);
  const std::uint64_t y = planner.place("Y", n * es);
  const std::uint64_t z = planner.place("Z", n * es);
  const std::uint64_t wv = planner.place("W", n * es);
  CpuWorkload w;
  w.name = fused ? "loop-fused" : "loop-separate";
  w.length = 6 * n;
  w.emit = [=](const AccessSink& sink) {
    const Emitter e(sink, es);
    auto body = [&](std::uint64_t i, std::uint64_t out, std::uint8_t out_tag) {
      e.read(x + i * es, tags::X);
      e.read(y + i * es, tags::Y);
      e.write(out + i * es, out_tag);
    };
    if (fused) {
      for (std::uint64_t i = 0; i < n; ++i) {
        body(i, z, tags::Z);
        body(i, wv, tags::W);
      }
    } else {
      for (std::uint64_t i = 0; i < n; ++i) body(i, z, tags::Z);
      for (std::uint64_t i = 0; i < n; ++i) body(i, wv, tags::W);
    }
  };
  return w;
}

CpuWorkload gen_transpose_overhead(std::uint64_t n, const GenOptions& opt) {
  const std::uint32_t es = opt.element_size;
  AddressPlanner planner(opt.bases);
  planner.place("A", n * n * es);
  const std::uint64_t b = planner.place("B", n * n * es);
  const std::uint64_t bt = planner.place("BT", n * n * es);
  CpuWorkload w;
  w.name = "transpose-overhead";
  w.length = 2 * n * n;
  w.emit = [=](const AccessSink& sink) {
    const Emitter e(sink, es);
    for (std::uint64_t r = 0; r < n; ++r) {
      for (std::uint64_t c = 0; c < n; ++c) {
        e.read(b + (r * n + c) * es, tags::B);
        e.write(bt + (c * n + r) * es, tags::BT);
      }
    }
  };
  return w;
}

}  // namespace cachesim
