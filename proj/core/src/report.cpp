#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cachesim/error.hpp"
#include "cachesim/harness.hpp"

namespace cachesim {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t to_u64(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw SimError(ErrorCode::PARSE_ERROR, "line " + std::to_string(line_no) + ": '" + s + "' is not a count");
  }
  return v;
}

}  // namespace

std::vector<ReportRow> report_rows(const SimResult& result) {
  std::vector<ReportRow> rows;
  for (const LevelResult& l : result.levels) {
    ReportRow row;
    row.experiment = result.experiment;
    row.level = l.name;
    row.enabled = l.enabled;
    row.transactions = result.transactions;
    row.trace_length = result.trace_length;
    if (l.enabled) {
      row.hits = l.stats.hits;
      row.misses = l.stats.misses;
      row.miss_rate = l.stats.miss_rate();
      row.evictions = l.stats.evictions;
    } else {
      row.level += kDisabledSuffix;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_csv(std::span<const SimResult> results, std::ostream& out) {
  out << kCsvHeader << '\n';
  char rate[32];
  for (const SimResult& r : results) {
    for (const ReportRow& row : report_rows(r)) {
      std::snprintf(rate, sizeof rate, "%.6f", row.miss_rate);
      out << row.experiment << ',' << row.level << ',' << row.hits << ',' << row.misses << ',' << rate << ','
          << row.evictions << ',' << row.transactions << ',' << row.trace_length << '\n';
    }
  }
}

void emit_csv(std::span<const SimResult> results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError(ErrorCode::IO_ERROR, "cannot write " + path.string());
  emit_csv(results, out);
  out.flush();
  if (!out) throw SimError(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

std::vector<SimResult> read_csv(std::istream& in) {
  std::vector<SimResult> out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SimError(ErrorCode::PARSE_ERROR, "empty report");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw SimError(ErrorCode::PARSE_ERROR, "line 1: unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != 8) {
      throw SimError(ErrorCode::PARSE_ERROR,
                     "line " + std::to_string(line_no) + ": expected 8 fields, got " + std::to_string(f.size()));
    }
    if (out.empty() || out.back().experiment != f[0]) {
      SimResult r;
      r.experiment = f[0];
      out.push_back(std::move(r));
    }
    SimResult& r = out.back();
    LevelResult l;
    l.name = f[1];
    if (l.name.ends_with(kDisabledSuffix)) {
      l.name.resize(l.name.size() - kDisabledSuffix.size());
      l.enabled = false;
    }
    l.stats.hits = to_u64(f[2], line_no);
    l.stats.misses = to_u64(f[3], line_no);
    l.stats.evictions = to_u64(f[5], line_no);
    r.transactions = to_u64(f[6], line_no);
    r.trace_length = to_u64(f[7], line_no);
    r.levels.push_back(std::move(l));
  }
  return out;
}

std::vector<SimResult> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError(ErrorCode::IO_ERROR, "cannot open " + path.string());
  return read_csv(in);
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::L1_MISSES: return "L1_MISSES";
    case Metric::L2_MISSES: return "L2_MISSES";
    case Metric::TRANSACTIONS: return "TRANSACTIONS";
  }
  return "?";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::IMPROVED: return "IMPROVED";
    case Verdict::REGRESSED: return "REGRESSED";
    case Verdict::EQUAL: return "EQUAL";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  std::string upper(text);
  for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (Metric m : {Metric::L1_MISSES, Metric::L2_MISSES, Metric::TRANSACTIONS}) {
    if (upper == to_string(m)) return m;
  }
  return std::nullopt;
}

std::uint64_t metric_value(const SimResult& r, Metric m) {
  if (m == Metric::TRANSACTIONS) return r.transactions;
  const std::string_view name = m == Metric::L1_MISSES ? "L1" : "L2";
  const LevelResult* l = r.level(name);
  if (l == nullptr || !l->enabled) {
    throw SimError(ErrorCode::METRIC_UNAVAILABLE,
                   std::string(name) + " is " + (l == nullptr ? "absent" : "disabled") + " in '" + r.experiment + "'");
  }
  return l->stats.misses;
}

DeltaReport compare(const SimResult& baseline, const SimResult& candidate, Metric metric) {
  DeltaReport d;
  d.metric = metric;
  d.baseline = metric_value(baseline, metric);
  d.candidate = metric_value(candidate, metric);
  d.absolute = static_cast<std::int64_t>(d.candidate) - static_cast<std::int64_t>(d.baseline);
  if (d.baseline != 0) {
    d.relative = static_cast<double>(d.absolute) / static_cast<double>(d.baseline);
  } else if (d.candidate != 0) {
    d.relative = 1.0;
  }
  d.verdict = d.candidate < d.baseline ? Verdict::IMPROVED
              : d.candidate > d.baseline ? Verdict::REGRESSED
                                         : Verdict::EQUAL;
  return d;
}

std::string format_delta(const DeltaReport& d) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s baseline=%llu candidate=%llu delta=%lld (%+.2f%%) %s",
                std::string(to_string(d.metric)).c_str(), static_cast<unsigned long long>(d.baseline),
                static_cast<unsigned long long>(d.candidate), static_cast<long long>(d.absolute), d.relative * 100.0,
                std::string(to_string(d.verdict)).c_str());
  return buf;
}

}  // namespace cachesim
