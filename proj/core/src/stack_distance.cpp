#include <unordered_map>

#include "cachesim/cache_model.hpp"

namespace cachesim {

namespace {

// Fenwick tree over reference times. Position t holds 1 while reference t is
// the most recent touch of its line, so a prefix range counts distinct lines.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t i, std::int64_t delta) noexcept {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  std::int64_t prefix(std::size_t i) const noexcept {  // sum over [0, i)
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

}  // namespace

std::vector<std::optional<std::uint64_t>> stack_distances(std::span<const std::uint64_t> lines) {
  std::vector<std::optional<std::uint64_t>> out(lines.size());
  std::unordered_map<std::uint64_t, std::size_t> last_seen;
  last_seen.reserve(lines.size());
  Fenwick marks(lines.size());
  for (std::size_t t = 0; t < lines.size(); ++t) {
    auto [it, inserted] = last_seen.try_emplace(lines[t], t);
    if (!inserted) {
      const std::size_t prev = it->second;
      out[t] = static_cast<std::uint64_t>(marks.prefix(t) - marks.prefix(prev + 1));
      marks.add(prev, -1);
      it->second = t;
    }
    marks.add(t, 1);
  }
  return out;
}

std::uint64_t stack_distance_oracle(std::span<const std::uint64_t> lines, std::uint64_t capacity_lines) {
  std::uint64_t misses = 0;
  for (const auto& d : stack_distances(lines)) {
    if (!d || *d >= capacity_lines) ++misses;
  }
  return misses;
}

}  // namespace cachesim
