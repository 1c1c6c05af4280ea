#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cachesim/cache_model.hpp"
#include "cachesim/gpu_exec.hpp"
#include "cachesim/workload_spec.hpp"
#include "cachesim/workloads.hpp"

namespace cachesim {

struct LevelOverride {
  std::optional<std::uint64_t> capacity;
  std::optional<std::uint32_t> line_size;
  std::optional<std::uint32_t> associativity;
  std::optional<Replacement> replacement;
  std::optional<WritePolicy> write_policy;
  std::optional<bool> enabled;

  friend bool operator==(const LevelOverride&, const LevelOverride&) = default;
};

// A preset plus per-level edits.
struct HierarchySpec {
  Platform preset = Platform::CPU;
  std::optional<GpuCacheMode> mode;
  // Applied to every level before the per-level overrides.
  std::optional<Replacement> replacement;
  std::map<std::string, LevelOverride> levels;

  friend bool operator==(const HierarchySpec&, const HierarchySpec&) = default;
};

// Throws SimError (VALIDATION_ERROR, GEOMETRY_ERROR, MODE_CONFLICT).
HierarchyConfig resolve(const HierarchySpec& spec, std::uint64_t seed = 0);

struct ExperimentConfig {
  std::string id;
  WorkloadSpec workload;
  HierarchySpec hierarchy;
  std::optional<ExecModelConfig> exec;
  bool warmup = false;
  std::uint64_t seed = 0;
  bool dump_trace = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Re-checks every cross-field rule (GPU needs exec, CPU forbids it, segment
// size matches the first enabled line, ...). Throws SimError.
void validate(const ExperimentConfig& cfg);

// JSON document {"experiments": [...]}; see docs/config.md. Unknown keys are
// rejected. Throws SimError(PARSE_ERROR) with line and column or the
// offending field, SimError(VALIDATION_ERROR) for semantic violations.
std::vector<ExperimentConfig> parse_config(std::string_view text);
std::vector<ExperimentConfig> load_config(const std::filesystem::path& path);

// Line format of trace dumps: "<thread> <R|W> 0x<hex address> <size> <tag>".
std::string format_trace_line(const MemoryAccess& a);

SimResult run_experiment(const ExperimentConfig& cfg, const AccessSink& dump = {});

// Runs experiments on up to `jobs` threads; results keep config order. With
// `trace_dir`, experiments flagged dump_trace write <trace_dir>/<id>.trace.
std::vector<SimResult> run_experiments(std::span<const ExperimentConfig> configs, unsigned jobs = 1,
                                       const std::optional<std::filesystem::path>& trace_dir = std::nullopt);

struct ReportRow {
  std::string experiment;
  std::string level;
  bool enabled = true;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double miss_rate = 0.0;
  std::uint64_t evictions = 0;
  std::uint64_t transactions = 0;
  std::uint64_t trace_length = 0;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,level,hits,misses,miss_rate,evictions,transactions,trace_length";
// Suffix appended to the level column of a disabled level.
inline constexpr std::string_view kDisabledSuffix = ":disabled";

std::vector<ReportRow> report_rows(const SimResult& result);
void emit_csv(std::span<const SimResult> results, std::ostream& out);
// Throws SimError(IO_ERROR).
void emit_csv(std::span<const SimResult> results, const std::filesystem::path& path);

// Rebuilds per-experiment results (levels, transactions, trace length) from
// CSV text in file order. Throws SimError(PARSE_ERROR).
std::vector<SimResult> read_csv(std::istream& in);
std::vector<SimResult> read_csv(const std::filesystem::path& path);

enum class Metric : std::uint8_t { L1_MISSES, L2_MISSES, TRANSACTIONS };
enum class Verdict : std::uint8_t { IMPROVED, REGRESSED, EQUAL };

std::string_view to_string(Metric m) noexcept;
std::string_view to_string(Verdict v) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;

// Throws SimError(METRIC_UNAVAILABLE) when the level is absent or disabled.
std::uint64_t metric_value(const SimResult& r, Metric m);

struct DeltaReport {
  Metric metric = Metric::L1_MISSES;
  std::uint64_t baseline = 0;
  std::uint64_t candidate = 0;
  std::int64_t absolute = 0;
  // (candidate - baseline) / baseline; 0 when both are 0.
  double relative = 0.0;
  Verdict verdict = Verdict::EQUAL;
};

// Lower is better.
DeltaReport compare(const SimResult& baseline, const SimResult& candidate, Metric metric);
std::string format_delta(const DeltaReport& d);

}  // namespace cachesim
