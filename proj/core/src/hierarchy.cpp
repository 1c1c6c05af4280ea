#include <bit>

#include "cachesim/cache_model.hpp"
#include "cachesim/error.hpp"

namespace cachesim {

double LevelStats::miss_rate() const noexcept {
  const std::uint64_t total = accesses();
  return total == 0 ? 0.0 : static_cast<double>(misses) / static_cast<double>(total);
}

LevelStats& LevelStats::operator+=(const LevelStats& other) noexcept {
  hits += other.hits;
  misses += other.misses;
  evictions += other.evictions;
  writebacks += other.writebacks;
  lines_fetched += other.lines_fetched;
  write_forwards += other.write_forwards;
  for (std::size_t i = 0; i < kMaxArrayTags; ++i) misses_by_tag[i] += other.misses_by_tag[i];
  return *this;
}

std::vector<LevelResult> SimResult::enabled_levels() const {
  std::vector<LevelResult> out;
  for (const LevelResult& l : levels) {
    if (l.enabled) out.push_back(l);
  }
  return out;
}

const LevelResult* SimResult::level(std::string_view name) const noexcept {
  for (const LevelResult& l : levels) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::uint64_t SimResult::total_misses() const noexcept {
  std::uint64_t total = 0;
  for (const LevelResult& l : levels) total += l.stats.misses;
  return total;
}

Hierarchy::Hierarchy(HierarchyConfig config, std::size_t private_l1_copies)
    : config_(std::move(config)), private_copies_(private_l1_copies == 0 ? 1 : private_l1_copies) {
  validate(config_);
  levels_.reserve(config_.levels.size());
  for (std::size_t k = 0; k < config_.levels.size(); ++k) {
    const CacheLevelConfig& lc = config_.levels[k];
    Level level;
    level.enabled = lc.enabled;
    level.write_policy = lc.write_policy;
    level.line_shift = static_cast<std::uint32_t>(std::countr_zero(lc.line_size));
    const std::size_t copies = (k == 0) ? private_copies_ : 1;
    if (lc.enabled) {
      for (std::size_t c = 0; c < copies; ++c) {
        CacheLevelConfig copy = lc;
        copy.random_seed = lc.random_seed + c;
        level.copies.emplace_back(copy);
      }
    }
    levels_.push_back(std::move(level));
  }
  stats_.assign(levels_.size(), LevelStats{});
}

void Hierarchy::record_eviction(std::size_t level, const CacheLevel::Eviction& ev) noexcept {
  if (!ev.happened) return;
  ++stats_[level].evictions;
  if (ev.dirty) ++stats_[level].writebacks;
}

AccessOutcome Hierarchy::access(const MemoryAccess& a, std::size_t sm) {
  if (a.is_noop()) {
    AccessOutcome out;
    out.count = levels_.size();
    return out;
  }
  return probe(a.address, a.kind, a.array_tag, sm);
}

AccessOutcome Hierarchy::probe(std::uint64_t address, AccessKind kind, std::uint8_t array_tag,
                               std::size_t sm) {
  AccessOutcome out;
  out.count = levels_.size();
  const std::size_t tag = array_tag < kMaxArrayTags ? array_tag : kMaxArrayTags - 1;

  for (std::size_t k = 0; k < levels_.size(); ++k) {
    Level& level = levels_[k];
    if (!level.enabled) {
      out.levels[k] = LevelOutcome::DISABLED;
      continue;
    }
    CacheLevel& cache = level.copies.size() == 1 ? level.copies[0] : level.copies[sm % level.copies.size()];
    const std::uint64_t line = address >> level.line_shift;
    LevelStats& s = stats_[k];
    const bool is_write = kind == AccessKind::WRITE;

    if (level.write_policy == WritePolicy::WRITE_BACK_ALLOCATE) {
      if (cache.lookup(line, is_write)) {
        ++s.hits;
        out.levels[k] = LevelOutcome::HIT;
        return out;
      }
      ++s.misses;
      ++s.misses_by_tag[tag];
      ++s.lines_fetched;
      record_eviction(k, cache.fill(line, is_write));
      out.levels[k] = LevelOutcome::MISS;
      // The fill below is a plain read of the line.
      kind = AccessKind::READ;
      continue;
    }

    // Write-through, no write-allocate.
    if (!is_write) {
      if (cache.lookup(line, false)) {
        ++s.hits;
        out.levels[k] = LevelOutcome::HIT;
        return out;
      }
      ++s.misses;
      ++s.misses_by_tag[tag];
      ++s.lines_fetched;
      record_eviction(k, cache.fill(line, false));
      out.levels[k] = LevelOutcome::MISS;
      continue;
    }
    if (cache.lookup(line, false)) {
      ++s.hits;
      out.levels[k] = LevelOutcome::HIT;
    } else {
      ++s.misses;
      ++s.misses_by_tag[tag];
      out.levels[k] = LevelOutcome::MISS;
    }
    ++s.write_forwards;
  }
  return out;
}

SimResult Hierarchy::run_trace(std::span<const MemoryAccess> trace) {
  std::uint64_t length = 0;
  for (const MemoryAccess& a : trace) {
    if (a.is_noop()) continue;
    probe(a.address, a.kind, a.array_tag, 0);
    ++length;
  }
  SimResult result;
  result.levels = results();
  result.trace_length = length;
  result.transactions = length;
  return result;
}

void Hierarchy::flush() {
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    for (CacheLevel& c : levels_[k].copies) stats_[k].writebacks += c.invalidate_all();
  }
}

void Hierarchy::reset_stats() noexcept {
  for (LevelStats& s : stats_) s = LevelStats{};
}

std::vector<LevelResult> Hierarchy::results() const {
  std::vector<LevelResult> out;
  out.reserve(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const CacheLevelConfig& lc = config_.levels[k];
    out.push_back(LevelResult{lc.name, lc.enabled, lc.line_size, stats_[k]});
  }
  return out;
}

Hierarchy build_hierarchy(const HierarchyConfig& config) { return Hierarchy(config); }

}  // namespace cachesim
