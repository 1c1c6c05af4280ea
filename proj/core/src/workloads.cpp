#include <array>
#include <string>

#include "cachesim/error.hpp"
#include "cachesim/workloads.hpp"
#include "workloads_internal.hpp"

namespace cachesim {

namespace {

constexpr std::array kBlockingVariants{Variant::NAIVE, Variant::HP_BLOCKS, Variant::EQUAL_TILES,
                                       Variant::SHARED_TILES};
constexpr std::array kFusionVariants{Variant::SEPARATE, Variant::FUSED};
constexpr std::array kMergingVariants{Variant::UNMERGED, Variant::MERGED, Variant::TEXTURE_UNMERGED,
                                      Variant::TEXTURE_MERGED};
constexpr std::array kTransposeVariants{Variant::UNTRANSPOSED, Variant::TRANSPOSED, Variant::TRANSPOSE_OVERHEAD};

constexpr std::array kAllTechniques{Technique::BLOCKING, Technique::FUSION, Technique::MERGING, Technique::TRANSPOSE};

[[noreturn]] void invalid(const std::string& what) { throw SimError(ErrorCode::VALIDATION_ERROR, what); }

}  // namespace

std::string_view to_string(Technique t) noexcept {
  switch (t) {
    case Technique::BLOCKING: return "BLOCKING";
    case Technique::FUSION: return "FUSION";
    case Technique::MERGING: return "MERGING";
    case Technique::TRANSPOSE: return "TRANSPOSE";
  }
  return "?";
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::NAIVE: return "NAIVE";
    case Variant::HP_BLOCKS: return "HP_BLOCKS";
    case Variant::EQUAL_TILES: return "EQUAL_TILES";
    case Variant::SHARED_TILES: return "SHARED_TILES";
    case Variant::SEPARATE: return "SEPARATE";
    case Variant::FUSED: return "FUSED";
    case Variant::UNMERGED: return "UNMERGED";
    case Variant::MERGED: return "MERGED";
    case Variant::TEXTURE_UNMERGED: return "TEXTURE_UNMERGED";
    case Variant::TEXTURE_MERGED: return "TEXTURE_MERGED";
    case Variant::UNTRANSPOSED: return "UNTRANSPOSED";
    case Variant::TRANSPOSED: return "TRANSPOSED";
    case Variant::TRANSPOSE_OVERHEAD: return "TRANSPOSE_OVERHEAD";
  }
  return "?";
}

std::optional<Technique> parse_technique(std::string_view text) noexcept {
  for (Technique t : kAllTechniques) {
    if (text == to_string(t)) return t;
  }
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view text) noexcept {
  for (Technique t : kAllTechniques) {
    for (Variant v : variants_of(t)) {
      if (text == to_string(v)) return v;
    }
  }
  return std::nullopt;
}

std::span<const Variant> variants_of(Technique t) noexcept {
  switch (t) {
    case Technique::BLOCKING: return kBlockingVariants;
    case Technique::FUSION: return kFusionVariants;
    case Technique::MERGING: return kMergingVariants;
    case Technique::TRANSPOSE: return kTransposeVariants;
  }
  return {};
}

Variant default_variant(Technique t) noexcept { return variants_of(t).front(); }

bool belongs_to(Variant v, Technique t) noexcept {
  for (Variant x : variants_of(t)) {
    if (x == v) return true;
  }
  return false;
}

bool supports(Variant v, Platform p) noexcept {
  switch (v) {
    case Variant::SHARED_TILES:
    case Variant::TEXTURE_UNMERGED:
    case Variant::TEXTURE_MERGED:
      return p == Platform::GPU;
    case Variant::HP_BLOCKS:
    case Variant::TRANSPOSE_OVERHEAD:
      return p == Platform::CPU;
    default:
      return true;
  }
}

std::uint64_t effective_stride(const WorkloadSpec& spec) noexcept {
  if (spec.stride != 0) return spec.stride;
  return spec.platform == Platform::CPU ? 16 : 64;
}

std::uint64_t GpuWorkload::access_count() const {
  std::uint64_t total = 0;
  for (const KernelPtr& k : launches) {
    for (std::uint64_t t = 0; t < k->thread_count(); ++t) {
      const std::uint32_t steps = k->step_count(t / 32 * 32);
      for (std::uint32_t s = 0; s < steps; ++s) total += k->access(t, s).is_noop() ? 0 : 1;
    }
  }
  return total;
}

Trace collect(const CpuWorkload& w) {
  Trace out;
  out.reserve(w.length);
  w.emit([&](const MemoryAccess& a) { out.push_back(a); });
  return out;
}

std::vector<std::vector<ThreadTrace>> collect(const GpuWorkload& w) {
  std::vector<std::vector<ThreadTrace>> out;
  for (const KernelPtr& k : w.launches) out.push_back(materialize(*k));
  return out;
}

Workload gen_matmul_naive(std::uint64_t n, Platform platform, const GenOptions& opt) {
  if (platform == Platform::CPU) return detail::cpu_matmul(n, false, opt);
  return detail::gpu_matmul(n, false, opt);
}

Workload gen_matmul_blocked(std::uint64_t n, std::uint64_t b, Variant variant, Platform platform,
                            const GenOptions& opt) {
  if (b == 0 || n % b != 0) {
    throw SimError(ErrorCode::BLOCK_MISMATCH,
                   "block size " + std::to_string(b) + " does not divide n = " + std::to_string(n));
  }
  if (!belongs_to(variant, Technique::BLOCKING)) invalid("not a blocking variant: " + std::string(to_string(variant)));
  if (!supports(variant, platform)) {
    invalid(std::string(to_string(variant)) + " is not available on " + std::string(to_string(platform)));
  }
  if (variant == Variant::NAIVE) return gen_matmul_naive(n, platform, opt);
  if (platform == Platform::CPU) return detail::cpu_matmul_blocked(n, b, variant, opt);
  if (variant == Variant::SHARED_TILES) return detail::gpu_matmul_shared(n, b, opt);
  // Without shared memory every thread still walks its own row of A and
  // column of B, one k-tile after the other: the same per-thread sequence as
  // the untiled kernel. The gain, if any, has to come from the cache.
  GpuWorkload w = detail::gpu_matmul(n, false, opt);
  w.name = "matmul-equal-tiles";
  return w;
}

Workload gen_array_merge(std::uint64_t n, bool merged, Platform platform, const GenOptions& opt) {
  const std::uint64_t stride = opt.stride != 0 ? opt.stride : (platform == Platform::CPU ? 16 : 64);
  if (n < stride) {
    throw SimError(ErrorCode::SIZE_MISMATCH,
                   "n = " + std::to_string(n) + " is smaller than the stride " + std::to_string(stride));
  }
  if (platform == Platform::CPU) return detail::cpu_array_merge(n, merged, opt);
  return detail::gpu_array_merge(n, merged, opt);
}

Workload gen_transpose_matmul(std::uint64_t n, bool transposed, Platform platform, const GenOptions& opt) {
  if (platform == Platform::CPU) return detail::cpu_matmul(n, transposed, opt);
  return detail::gpu_matmul(n, transposed, opt);
}

void validate(const WorkloadSpec& spec) {
  if (spec.n < 1) invalid("n must be at least 1");
  switch (spec.element_size) {
    case 1:
    case 2:
    case 4:
    case 8:
    case 16:
      break;
    default:
      invalid("element_size must be one of 1, 2, 4, 8, 16");
  }
  if (!belongs_to(spec.variant, spec.technique)) {
    invalid("variant " + std::string(to_string(spec.variant)) + " does not belong to technique " +
            std::string(to_string(spec.technique)));
  }
  if (!supports(spec.variant, spec.platform)) {
    invalid("variant " + std::string(to_string(spec.variant)) + " is not available on " +
            std::string(to_string(spec.platform)));
  }
  for (const auto& [name, base] : spec.bases) {
    if (base % spec.element_size != 0) invalid("base of array '" + name + "' is not element aligned");
  }
  switch (spec.technique) {
    case Technique::BLOCKING:
      if (spec.block == 0 || spec.n % spec.block != 0) {
        throw SimError(ErrorCode::BLOCK_MISMATCH, "block size " + std::to_string(spec.block) +
                                                      " does not divide n = " + std::to_string(spec.n));
      }
      break;
    case Technique::MERGING:
      if (spec.variant == Variant::TEXTURE_MERGED || spec.variant == Variant::TEXTURE_UNMERGED) {
        if (spec.tile_edge == 0 || spec.n % spec.tile_edge != 0) {
          throw SimError(ErrorCode::SIZE_MISMATCH, "n = " + std::to_string(spec.n) +
                                                       " is not a multiple of tile edge " +
                                                       std::to_string(spec.tile_edge));
        }
      } else if (spec.n < effective_stride(spec)) {
        throw SimError(ErrorCode::SIZE_MISMATCH, "n = " + std::to_string(spec.n) + " is smaller than the stride " +
                                                     std::to_string(effective_stride(spec)));
      }
      break;
    default:
      break;
  }
}

GenOptions gen_options_for(const WorkloadSpec& spec) {
  GenOptions opt;
  opt.element_size = spec.element_size;
  opt.bases = spec.bases;
  opt.stride = spec.stride;
  opt.tile_edge = spec.tile_edge;
  return opt;
}

Workload make_workload(const WorkloadSpec& spec, const GenOptions& opt) {
  validate(spec);
  const std::uint64_t n = spec.n;
  switch (spec.technique) {
    case Technique::BLOCKING:
      return gen_matmul_blocked(n, spec.block, spec.variant, spec.platform, opt);
    case Technique::FUSION: {
      const bool fused = spec.variant == Variant::FUSED;
      if (spec.platform == Platform::CPU) return gen_loop_fusion(n, fused, opt);
      return gen_kernel_fusion(n, fused, opt);
    }
    case Technique::MERGING:
      if (spec.variant == Variant::TEXTURE_MERGED || spec.variant == Variant::TEXTURE_UNMERGED) {
        return gen_texture_merge(n, spec.variant == Variant::TEXTURE_MERGED, opt);
      }
      return gen_array_merge(n, spec.variant == Variant::MERGED, spec.platform, opt);
    case Technique::TRANSPOSE:
      if (spec.variant == Variant::TRANSPOSE_OVERHEAD) return gen_transpose_overhead(n, opt);
      return gen_transpose_matmul(n, spec.variant == Variant::TRANSPOSED, spec.platform, opt);
  }
  invalid("unknown technique");
}

}  // namespace cachesim
