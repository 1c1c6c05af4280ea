#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace cachesim {

enum class Platform : std::uint8_t { CPU, GPU };
enum class AccessKind : std::uint8_t { READ, WRITE };

std::string_view to_string(Platform p) noexcept;
std::optional<Platform> parse_platform(std::string_view text) noexcept;

// One byte-addressed load or store. A size of zero marks a padding step in a
// per-thread GPU trace; padding never reaches the memory system.
struct MemoryAccess {
  std::uint64_t address = 0;
  std::uint32_t thread_id = 0;
  std::uint8_t size = 8;
  AccessKind kind = AccessKind::READ;
  std::uint8_t array_tag = 0;

  static constexpr MemoryAccess noop(std::uint32_t thread) noexcept {
    return MemoryAccess{0, thread, 0, AccessKind::READ, 0};
  }
  constexpr bool is_noop() const noexcept { return size == 0; }
  constexpr bool is_write() const noexcept { return kind == AccessKind::WRITE; }

  friend constexpr bool operator==(const MemoryAccess&, const MemoryAccess&) = default;
};

// Natural alignment plus a supported width.
bool is_well_formed(const MemoryAccess& a) noexcept;

using Trace = std::vector<MemoryAccess>;
using AccessSink = std::function<void(const MemoryAccess&)>;

constexpr bool is_power_of_two(std::uint64_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

constexpr std::uint64_t align_up(std::uint64_t v, std::uint64_t alignment) noexcept {
  return (v + alignment - 1) / alignment * alignment;
}

}  // namespace cachesim
