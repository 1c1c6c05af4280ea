#include <string>

#include "cachesim/error.hpp"
#include "cachesim/workloads.hpp"

namespace cachesim {

std::uint64_t LayoutMap::address(std::uint64_t base, std::uint64_t row, std::uint64_t col, std::uint64_t n,
                                 std::uint32_t array) const noexcept {
  switch (kind) {
    case LayoutKind::ROW_MAJOR:
      return base + (row * n + col) * element_size;
    case LayoutKind::TRANSPOSED:
      return base + (col * n + row) * element_size;
    case LayoutKind::MERGED_AOS:
      return base + ((row * n + col) * arrays + array) * element_size;
    case LayoutKind::TILED_2D: {
      const std::uint64_t edge = tile_edge;
      const std::uint64_t tiles_per_row = n / edge;
      const std::uint64_t tile = (row / edge) * tiles_per_row + col / edge;
      const std::uint64_t in_tile = (row % edge) * edge + col % edge;
      return base + ((tile * arrays + array) * edge * edge + in_tile) * element_size;
    }
  }
  return base;
}

std::uint64_t LayoutMap::address(std::uint64_t base, std::uint64_t i, std::uint32_t array) const noexcept {
  if (kind == LayoutKind::MERGED_AOS) return base + (i * arrays + array) * element_size;
  return base + i * element_size;
}

std::uint64_t tile_address_map(std::uint64_t row, std::uint64_t col, std::uint64_t n, std::uint32_t tile_edge,
                               std::uint32_t element_size, std::uint64_t base) {
  if (tile_edge == 0 || n % tile_edge != 0) {
    throw SimError(ErrorCode::SIZE_MISMATCH,
                   "tile edge " + std::to_string(tile_edge) + " does not divide n = " + std::to_string(n));
  }
  if (row >= n || col >= n) {
    throw SimError(ErrorCode::OUT_OF_RANGE, "(" + std::to_string(row) + ", " + std::to_string(col) +
                                                ") outside a " + std::to_string(n) + "x" + std::to_string(n) + " array");
  }
  const LayoutMap map{LayoutKind::TILED_2D, tile_edge, 1, element_size};
  return map.address(base, row, col, n);
}

AddressPlanner::AddressPlanner(std::map<std::string, std::uint64_t> overrides, std::uint64_t first_base)
    : overrides_(std::move(overrides)), cursor_(first_base) {}

std::uint64_t AddressPlanner::place(std::string_view name, std::uint64_t bytes) {
  if (auto it = overrides_.find(std::string(name)); it != overrides_.end()) return it->second;
  const std::uint64_t base = align_up(cursor_, kAlignment);
  cursor_ = base + bytes + kGuardBytes;
  return base;
}

}  // namespace cachesim
