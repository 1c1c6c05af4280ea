#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cachesim/types.hpp"
#include "cachesim/workload_spec.hpp"

namespace cachesim {

enum class Replacement : std::uint8_t { LRU, FIFO, RANDOM };
enum class WritePolicy : std::uint8_t { WRITE_BACK_ALLOCATE, WRITE_THROUGH_NO_ALLOCATE };
enum class GpuCacheMode : std::uint8_t { L1_48K, L1_16K, L1_OFF };

std::string_view to_string(Replacement r) noexcept;
std::string_view to_string(WritePolicy w) noexcept;
std::string_view to_string(GpuCacheMode m) noexcept;
std::optional<Replacement> parse_replacement(std::string_view text) noexcept;
std::optional<WritePolicy> parse_write_policy(std::string_view text) noexcept;
std::optional<GpuCacheMode> parse_gpu_mode(std::string_view text) noexcept;

inline constexpr std::size_t kMaxLevels = 8;
inline constexpr std::size_t kMaxArrayTags = 8;
inline constexpr std::uint64_t KiB = 1024;

struct CacheLevelConfig {
  std::string name;
  std::uint64_t capacity = 0;
  std::uint32_t line_size = 64;
  std::uint32_t associativity = 1;
  Replacement replacement = Replacement::LRU;
  // Only consulted for RANDOM replacement.
  std::uint64_t random_seed = 0;
  WritePolicy write_policy = WritePolicy::WRITE_BACK_ALLOCATE;
  bool enabled = true;

  // Capacity / (line_size * associativity); assumes a validated config.
  std::uint64_t set_count() const noexcept;

  friend bool operator==(const CacheLevelConfig&, const CacheLevelConfig&) = default;
};

struct HierarchyConfig {
  // L1 first, memory side last.
  std::vector<CacheLevelConfig> levels;
  Platform platform = Platform::CPU;
  std::optional<GpuCacheMode> gpu_mode;

  const CacheLevelConfig* find(std::string_view name) const noexcept;
  CacheLevelConfig* find(std::string_view name) noexcept;
  // Line size of the first enabled level, 0 if every level is disabled.
  std::uint32_t first_enabled_line_size() const noexcept;
  std::size_t enabled_count() const noexcept;

  friend bool operator==(const HierarchyConfig&, const HierarchyConfig&) = default;
};

// Throws SimError(GEOMETRY_ERROR) for bad geometry and
// SimError(MODE_CONFLICT) when a GPU mode disagrees with the levels.
void validate(const CacheLevelConfig& level);
void validate(const HierarchyConfig& config);

// Intel Core i5-3230M (Ivy Bridge): 32KB/256KB/3MB, 64B lines.
HierarchyConfig cpu_preset();
// Tesla C2075 (Fermi). Associativity is not published; L1 defaults to 4-way
// and L2 to 16-way.
HierarchyConfig gpu_preset(GpuCacheMode mode);
// Shared memory left over by the L1/shared split of a mode.
std::uint64_t shared_memory_bytes(GpuCacheMode mode) noexcept;

struct LevelStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t lines_fetched = 0;
  // Stores passed downstream by a write-through level, hit or miss.
  std::uint64_t write_forwards = 0;
  std::array<std::uint64_t, kMaxArrayTags> misses_by_tag{};

  std::uint64_t accesses() const noexcept { return hits + misses; }
  double miss_rate() const noexcept;
  // Requests this level sends to the next one.
  std::uint64_t downstream_requests() const noexcept { return lines_fetched + write_forwards; }

  LevelStats& operator+=(const LevelStats& other) noexcept;
  friend bool operator==(const LevelStats&, const LevelStats&) = default;
};

struct LevelResult {
  std::string name;
  bool enabled = true;
  std::uint32_t line_size = 0;
  LevelStats stats;

  std::uint64_t bytes_fetched() const noexcept { return stats.lines_fetched * line_size; }
  friend bool operator==(const LevelResult&, const LevelResult&) = default;
};

struct SimResult {
  std::string experiment;
  // Every configured level in hierarchy order; disabled ones carry zeros.
  std::vector<LevelResult> levels;
  std::uint64_t trace_length = 0;
  // Coalesced segment requests for GPU runs, trace_length for CPU runs.
  std::uint64_t transactions = 0;
  WorkloadSpec workload_echo;

  std::vector<LevelResult> enabled_levels() const;
  const LevelResult* level(std::string_view name) const noexcept;
  std::uint64_t total_misses() const noexcept;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

enum class LevelOutcome : std::uint8_t { NOT_REACHED, HIT, MISS, DISABLED };

struct AccessOutcome {
  std::array<LevelOutcome, kMaxLevels> levels{};
  std::size_t count = 0;

  LevelOutcome operator[](std::size_t i) const noexcept { return levels[i]; }
  std::span<const LevelOutcome> view() const noexcept { return {levels.data(), count}; }
};

// A single set-associative array of lines. Addresses handed to it are line
// numbers (byte address / line size).
class CacheLevel {
 public:
  explicit CacheLevel(const CacheLevelConfig& config);

  struct Eviction {
    bool happened = false;
    bool dirty = false;
    std::uint64_t line = 0;
  };

  // Looks the line up and, on a hit, updates recency (LRU) and optionally
  // marks it dirty.
  bool lookup(std::uint64_t line, bool mark_dirty) noexcept;
  bool contains(std::uint64_t line) const noexcept;
  // Installs a line that is known to be absent.
  Eviction fill(std::uint64_t line, bool dirty) noexcept;
  // Invalidates every line and returns how many were dirty.
  std::uint64_t invalidate_all() noexcept;

  std::uint64_t set_count() const noexcept { return sets_; }
  std::uint32_t ways() const noexcept { return ways_; }
  std::uint64_t valid_lines() const noexcept;

 private:
  struct Way {
    std::uint64_t line = 0;
    std::uint64_t stamp = 0;
    bool valid = false;
    bool dirty = false;
  };

  std::size_t set_base(std::uint64_t line) const noexcept {
    return static_cast<std::size_t>(line % sets_) * ways_;
  }

  std::uint64_t sets_;
  std::uint32_t ways_;
  Replacement replacement_;
  std::vector<Way> ways_storage_;
  std::uint64_t clock_ = 0;
  std::mt19937_64 rng_;
};

// The simulated memory system of one run. Level 0 may be replicated per SM
// (each copy private, statistics summed); deeper levels are shared.
class Hierarchy {
 public:
  explicit Hierarchy(HierarchyConfig config, std::size_t private_l1_copies = 1);

  AccessOutcome access(const MemoryAccess& a, std::size_t sm = 0);
  // Line-granular request: used for coalesced GPU transactions whose width
  // equals the first level's line.
  AccessOutcome probe(std::uint64_t address, AccessKind kind, std::uint8_t array_tag,
                      std::size_t sm = 0);

  SimResult run_trace(std::span<const MemoryAccess> trace);
  void flush();
  void reset_stats() noexcept;

  const HierarchyConfig& config() const noexcept { return config_; }
  const LevelStats& stats(std::size_t level) const noexcept { return stats_[level]; }
  std::vector<LevelResult> results() const;
  std::size_t private_copies() const noexcept { return private_copies_; }

 private:
  struct Level {
    std::vector<CacheLevel> copies;
    std::uint32_t line_shift = 0;
    WritePolicy write_policy = WritePolicy::WRITE_BACK_ALLOCATE;
    bool enabled = true;
  };

  void record_eviction(std::size_t level, const CacheLevel::Eviction& ev) noexcept;

  HierarchyConfig config_;
  std::size_t private_copies_;
  std::vector<Level> levels_;
  std::vector<LevelStats> stats_;
};

Hierarchy build_hierarchy(const HierarchyConfig& config);

// Miss count of a fully-associative LRU cache holding `capacity_lines`
// lines, from reuse (stack) distances.
std::uint64_t stack_distance_oracle(std::span<const std::uint64_t> lines,
                                    std::uint64_t capacity_lines);

// Stack distance of every reference; nullopt for a first touch.
std::vector<std::optional<std::uint64_t>> stack_distances(std::span<const std::uint64_t> lines);

}  // namespace cachesim
