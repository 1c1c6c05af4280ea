#pragma once

// Reference models written without reusing any library code paths. They are
// slow and simple on purpose: lists, sets and brute-force scans.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <list>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace oracle {

// Fully-associative LRU by brute-force list search.
inline std::uint64_t lru_misses(const std::vector<std::uint64_t>& lines, std::size_t capacity) {
  std::list<std::uint64_t> stack;
  std::uint64_t misses = 0;
  for (std::uint64_t line : lines) {
    auto it = std::find(stack.begin(), stack.end(), line);
    if (it == stack.end()) {
      ++misses;
      if (stack.size() == capacity) stack.pop_back();
    } else {
      stack.erase(it);
    }
    stack.push_front(line);
  }
  return misses;
}

// Brute-force stack distance: number of distinct lines since the last touch.
inline std::vector<long long> stack_distances(const std::vector<std::uint64_t>& lines) {
  std::vector<long long> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    long long d = -1;
    std::set<std::uint64_t> between;
    for (std::size_t j = i; j-- > 0;) {
      if (lines[j] == lines[i]) {
        d = static_cast<long long>(between.size());
        break;
      }
      between.insert(lines[j]);
    }
    out.push_back(d);
  }
  return out;
}

// Set-associative cache with a per-set recency list (front = most recent).
// fifo=true keeps insertion order instead.
class SetAssoc {
 public:
  SetAssoc(std::uint64_t sets, std::size_t ways, bool fifo = false) : sets_(sets), ways_(ways), fifo_(fifo) {}

  bool touch(std::uint64_t line) {
    std::deque<std::uint64_t>& set = table_[line % sets_];
    auto it = std::find(set.begin(), set.end(), line);
    if (it != set.end()) {
      if (!fifo_) {
        set.erase(it);
        set.push_front(line);
      }
      return true;
    }
    if (set.size() == ways_) set.pop_back();
    set.push_front(line);
    return false;
  }

 private:
  std::uint64_t sets_;
  std::size_t ways_;
  bool fifo_;
  std::map<std::uint64_t, std::deque<std::uint64_t>> table_;
};

// Distinct segments touched by a set of byte addresses.
inline std::size_t distinct_segments(const std::vector<std::uint64_t>& addresses, std::uint64_t segment) {
  std::set<std::uint64_t> s;
  for (std::uint64_t a : addresses) s.insert(a / segment);
  return s.size();
}

inline std::vector<std::uint64_t> random_lines(std::uint64_t seed, std::size_t length, std::uint64_t distinct) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, distinct - 1);
  std::vector<std::uint64_t> out(length);
  for (auto& l : out) l = pick(rng);
  return out;
}

}  // namespace oracle
