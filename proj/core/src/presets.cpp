#include <string>

#include "cachesim/cache_model.hpp"
#include "cachesim/error.hpp"

namespace cachesim {

std::string_view to_string(Replacement r) noexcept {
  switch (r) {
    case Replacement::LRU: return "LRU";
    case Replacement::FIFO: return "FIFO";
    case Replacement::RANDOM: return "RANDOM";
  }
  return "?";
}

std::string_view to_string(WritePolicy w) noexcept {
  return w == WritePolicy::WRITE_BACK_ALLOCATE ? "WRITE_BACK_ALLOCATE" : "WRITE_THROUGH_NO_ALLOCATE";
}

std::string_view to_string(GpuCacheMode m) noexcept {
  switch (m) {
    case GpuCacheMode::L1_48K: return "L1_48K";
    case GpuCacheMode::L1_16K: return "L1_16K";
    case GpuCacheMode::L1_OFF: return "L1_OFF";
  }
  return "?";
}

std::optional<Replacement> parse_replacement(std::string_view text) noexcept {
  for (Replacement r : {Replacement::LRU, Replacement::FIFO, Replacement::RANDOM}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

std::optional<WritePolicy> parse_write_policy(std::string_view text) noexcept {
  for (WritePolicy w : {WritePolicy::WRITE_BACK_ALLOCATE, WritePolicy::WRITE_THROUGH_NO_ALLOCATE}) {
    if (text == to_string(w)) return w;
  }
  return std::nullopt;
}

std::optional<GpuCacheMode> parse_gpu_mode(std::string_view text) noexcept {
  for (GpuCacheMode m : {GpuCacheMode::L1_48K, GpuCacheMode::L1_16K, GpuCacheMode::L1_OFF}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::uint64_t CacheLevelConfig::set_count() const noexcept {
  const std::uint64_t way_bytes = static_cast<std::uint64_t>(line_size) * associativity;
  return way_bytes == 0 ? 0 : capacity / way_bytes;
}

const CacheLevelConfig* HierarchyConfig::find(std::string_view name) const noexcept {
  for (const CacheLevelConfig& l : levels) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

CacheLevelConfig* HierarchyConfig::find(std::string_view name) noexcept {
  for (CacheLevelConfig& l : levels) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::uint32_t HierarchyConfig::first_enabled_line_size() const noexcept {
  for (const CacheLevelConfig& l : levels) {
    if (l.enabled) return l.line_size;
  }
  return 0;
}

std::size_t HierarchyConfig::enabled_count() const noexcept {
  std::size_t n = 0;
  for (const CacheLevelConfig& l : levels) n += l.enabled ? 1 : 0;
  return n;
}

void validate(const CacheLevelConfig& level) {
  const std::string who = "level '" + level.name + "': ";
  if (!is_power_of_two(level.line_size)) {
    throw SimError(ErrorCode::GEOMETRY_ERROR,
                   who + "line size " + std::to_string(level.line_size) + " is not a power of two");
  }
  if (level.associativity == 0) {
    throw SimError(ErrorCode::GEOMETRY_ERROR, who + "associativity must be positive");
  }
  const std::uint64_t way_bytes = static_cast<std::uint64_t>(level.line_size) * level.associativity;
  if (level.capacity == 0 || level.capacity % way_bytes != 0) {
    throw SimError(ErrorCode::GEOMETRY_ERROR,
                   who + "capacity " + std::to_string(level.capacity) + " is not a positive multiple of line_size*associativity = " +
                       std::to_string(way_bytes));
  }
}

namespace {

void check_gpu_mode(const HierarchyConfig& config) {
  if (!config.gpu_mode) {
    throw SimError(ErrorCode::MODE_CONFLICT, "GPU hierarchy requires a gpu_mode");
  }
  if (config.levels.size() != 2) {
    throw SimError(ErrorCode::MODE_CONFLICT, "GPU hierarchy must have exactly two levels (L1, L2)");
  }
  const CacheLevelConfig& l1 = config.levels[0];
  const CacheLevelConfig& l2 = config.levels[1];
  const std::string mode(to_string(*config.gpu_mode));
  auto conflict = [&](const std::string& what) {
    throw SimError(ErrorCode::MODE_CONFLICT, "mode " + mode + ": " + what);
  };
  switch (*config.gpu_mode) {
    case GpuCacheMode::L1_48K:
    case GpuCacheMode::L1_16K: {
      const std::uint64_t want = *config.gpu_mode == GpuCacheMode::L1_48K ? 48 * KiB : 16 * KiB;
      if (!l1.enabled) conflict("L1 must be enabled");
      if (l1.capacity != want) conflict("L1 capacity must be " + std::to_string(want) + " bytes");
      if (l2.line_size != 128) conflict("L2 line size must be 128 bytes");
      break;
    }
    case GpuCacheMode::L1_OFF:
      if (l1.enabled) conflict("L1 must be disabled");
      if (l2.line_size != 32) conflict("L2 line size must be 32 bytes");
      break;
  }
  if (!l2.enabled) conflict("L2 cannot be disabled");
}

}  // namespace

void validate(const HierarchyConfig& config) {
  if (config.levels.empty() || config.levels.size() > kMaxLevels) {
    throw SimError(ErrorCode::GEOMETRY_ERROR,
                   "hierarchy must have between 1 and " + std::to_string(kMaxLevels) + " levels");
  }
  for (const CacheLevelConfig& l : config.levels) validate(l);

  if (config.platform == Platform::GPU) {
    check_gpu_mode(config);
  } else if (config.gpu_mode) {
    throw SimError(ErrorCode::MODE_CONFLICT, "gpu_mode given for a CPU hierarchy");
  }

  // Line sizes grow (or stay equal) moving away from L1, each dividing the next.
  const CacheLevelConfig* upper = nullptr;
  for (const CacheLevelConfig& l : config.levels) {
    if (!l.enabled) continue;
    if (upper != nullptr && l.line_size % upper->line_size != 0) {
      throw SimError(ErrorCode::GEOMETRY_ERROR, "line size of '" + upper->name + "' (" +
                                                    std::to_string(upper->line_size) + ") must divide that of '" + l.name +
                                                    "' (" + std::to_string(l.line_size) + ")");
    }
    upper = &l;
  }
  if (upper == nullptr) throw SimError(ErrorCode::GEOMETRY_ERROR, "every level is disabled");
}

HierarchyConfig cpu_preset() {
  HierarchyConfig h;
  h.platform = Platform::CPU;
  h.levels = {
      {"L1", 32 * KiB, 64, 8, Replacement::LRU, 0, WritePolicy::WRITE_BACK_ALLOCATE, true},
      {"L2", 256 * KiB, 64, 8, Replacement::LRU, 0, WritePolicy::WRITE_BACK_ALLOCATE, true},
      {"L3", 3072 * KiB, 64, 12, Replacement::LRU, 0, WritePolicy::WRITE_BACK_ALLOCATE, true},
  };
  return h;
}

HierarchyConfig gpu_preset(GpuCacheMode mode) {
  HierarchyConfig h;
  h.platform = Platform::GPU;
  h.gpu_mode = mode;
  const bool l1_on = mode != GpuCacheMode::L1_OFF;
  const std::uint64_t l1_capacity = mode == GpuCacheMode::L1_48K ? 48 * KiB : 16 * KiB;
  const std::uint32_t l2_line = l1_on ? 128 : 32;
  h.levels = {
      {"L1", l1_capacity, 128, 4, Replacement::LRU, 0, WritePolicy::WRITE_THROUGH_NO_ALLOCATE, l1_on},
      {"L2", 768 * KiB, l2_line, 16, Replacement::LRU, 0, WritePolicy::WRITE_BACK_ALLOCATE, true},
  };
  return h;
}

std::uint64_t shared_memory_bytes(GpuCacheMode mode) noexcept {
  return mode == GpuCacheMode::L1_48K ? 16 * KiB : 48 * KiB;
}

}  // namespace cachesim
