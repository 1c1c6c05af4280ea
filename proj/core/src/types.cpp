#include "cachesim/types.hpp"

namespace cachesim {

std::string_view to_string(Platform p) noexcept {
  return p == Platform::CPU ? "CPU" : "GPU";
}

std::optional<Platform> parse_platform(std::string_view text) noexcept {
  if (text == "CPU") return Platform::CPU;
  if (text == "GPU") return Platform::GPU;
  return std::nullopt;
}

bool is_well_formed(const MemoryAccess& a) noexcept {
  switch (a.size) {
    case 1:
    case 2:
    case 4:
    case 8:
    case 16:
      return a.address % a.size == 0;
    default:
      return false;
  }
}

}  // namespace cachesim
