#include <algorithm>
#include <limits>

#include "cachesim/cache_model.hpp"

namespace cachesim {

CacheLevel::CacheLevel(const CacheLevelConfig& config)
    : sets_(config.set_count()),
      ways_(config.associativity),
      replacement_(config.replacement),
      ways_storage_(static_cast<std::size_t>(sets_) * ways_),
      rng_(config.random_seed) {}

bool CacheLevel::lookup(std::uint64_t line, bool mark_dirty) noexcept {
  Way* set = &ways_storage_[set_base(line)];
  for (std::uint32_t w = 0; w < ways_; ++w) {
    Way& way = set[w];
    if (way.valid && way.line == line) {
      if (replacement_ == Replacement::LRU) way.stamp = ++clock_;
      way.dirty = way.dirty || mark_dirty;
      return true;
    }
  }
  return false;
}

bool CacheLevel::contains(std::uint64_t line) const noexcept {
  const Way* set = &ways_storage_[set_base(line)];
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (set[w].valid && set[w].line == line) return true;
  }
  return false;
}

CacheLevel::Eviction CacheLevel::fill(std::uint64_t line, bool dirty) noexcept {
  Way* set = &ways_storage_[set_base(line)];
  Way* victim = nullptr;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (!set[w].valid) {
      victim = &set[w];
      break;
    }
  }
  Eviction ev;
  if (victim == nullptr) {
    if (replacement_ == Replacement::RANDOM) {
      // Modulo rather than a distribution object keeps the sequence
      // identical across standard libraries.
      victim = &set[rng_() % ways_];
    } else {
      // LRU stamps on use, FIFO only on fill; both evict the oldest stamp.
      victim = std::min_element(set, set + ways_,
                                [](const Way& a, const Way& b) { return a.stamp < b.stamp; });
    }
    ev.happened = true;
    ev.dirty = victim->dirty;
    ev.line = victim->line;
  }
  victim->line = line;
  victim->valid = true;
  victim->dirty = dirty;
  victim->stamp = ++clock_;
  return ev;
}

std::uint64_t CacheLevel::invalidate_all() noexcept {
  std::uint64_t dirty = 0;
  for (Way& way : ways_storage_) {
    if (way.valid && way.dirty) ++dirty;
    way = Way{};
  }
  return dirty;
}

std::uint64_t CacheLevel::valid_lines() const noexcept {
  return static_cast<std::uint64_t>(
      std::count_if(ways_storage_.begin(), ways_storage_.end(), [](const Way& w) { return w.valid; }));
}

}  // namespace cachesim
