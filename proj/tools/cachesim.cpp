#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cachesim/error.hpp"
#include "cachesim/harness.hpp"

namespace fs = std::filesystem;
using namespace cachesim;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

int run(const fs::path& config, const fs::path& out_dir, std::optional<std::uint64_t> seed, bool dump_trace,
        unsigned jobs) {
  std::vector<ExperimentConfig> configs = load_config(config);
  for (ExperimentConfig& c : configs) {
    if (seed) c.seed = *seed;
    if (dump_trace) c.dump_trace = true;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw SimError(ErrorCode::IO_ERROR, "cannot create " + out_dir.string() + ": " + ec.message());

  const std::vector<SimResult> results = run_experiments(configs, jobs, out_dir);
  emit_csv(results, out_dir / "results.csv");
  for (const SimResult& r : results) {
    std::cout << r.experiment << ": " << r.trace_length << " accesses, " << r.transactions << " transactions";
    for (const LevelResult& l : r.enabled_levels()) std::cout << ", " << l.name << " misses " << l.stats.misses;
    std::cout << '\n';
  }
  std::cout << "wrote " << (out_dir / "results.csv").string() << '\n';
  return 0;
}

void list_workloads() {
  for (Technique t : {Technique::BLOCKING, Technique::FUSION, Technique::MERGING, Technique::TRANSPOSE}) {
    std::cout << to_string(t) << '\n';
    for (Variant v : variants_of(t)) {
      std::cout << "  " << to_string(v);
      const bool cpu = supports(v, Platform::CPU);
      const bool gpu = supports(v, Platform::GPU);
      std::cout << "  [" << (cpu && gpu ? "CPU,GPU" : cpu ? "CPU" : "GPU") << "]";
      if (v == default_variant(t)) std::cout << "  (default)";
      std::cout << '\n';
    }
  }
}

const SimResult& pick(const std::vector<SimResult>& results, const std::string& id, std::size_t index,
                      const fs::path& file) {
  if (!id.empty()) {
    for (const SimResult& r : results) {
      if (r.experiment == id) return r;
    }
    throw SimError(ErrorCode::VALIDATION_ERROR, "no experiment '" + id + "' in " + file.string());
  }
  if (index >= results.size()) {
    throw SimError(ErrorCode::VALIDATION_ERROR, file.string() + " has only " + std::to_string(results.size()) +
                                                    " experiments");
  }
  return results[index];
}

int compare_files(const fs::path& base_file, const fs::path& cand_file, const std::string& metric_text,
                  const std::string& base_id, const std::string& cand_id) {
  const auto metric = parse_metric(metric_text);
  if (!metric) {
    throw SimError(ErrorCode::VALIDATION_ERROR,
                   "unknown metric '" + metric_text + "' (expected L1_MISSES, L2_MISSES or TRANSACTIONS)");
  }
  const std::vector<SimResult> base = read_csv(base_file);
  const std::vector<SimResult> cand = read_csv(cand_file);
  if (!base_id.empty() || !cand_id.empty()) {
    const SimResult& b = pick(base, base_id, 0, base_file);
    const SimResult& c = pick(cand, cand_id, 0, cand_file);
    std::cout << b.experiment << " -> " << c.experiment << ": " << format_delta(compare(b, c, *metric)) << '\n';
    return 0;
  }
  if (base.size() != cand.size()) {
    throw SimError(ErrorCode::VALIDATION_ERROR, "reports hold " + std::to_string(base.size()) + " and " +
                                                    std::to_string(cand.size()) +
                                                    " experiments; select a pair with --baseline-id/--candidate-id");
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::cout << base[i].experiment << " -> " << cand[i].experiment << ": "
              << format_delta(compare(base[i], cand[i], *metric)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven CPU/GPU cache simulator"};
  app.require_subcommand(1);

  fs::path config;
  fs::path out_dir;
  std::optional<std::uint64_t> seed;
  bool dump_trace = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* run_cmd = app.add_subcommand("run", "Run the experiments of a config file");
  run_cmd->add_option("--config", config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Override every experiment's seed");
  run_cmd->add_flag("--dump-trace", dump_trace, "Write <out>/<id>.trace for every experiment");
  run_cmd->add_option("--jobs,-j", jobs, "Experiments run in parallel")->check(CLI::PositiveNumber);

  app.add_subcommand("list-workloads", "Print techniques and their variants");

  fs::path base_file;
  fs::path cand_file;
  std::string metric;
  std::string base_id;
  std::string cand_id;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two result files on one metric");
  cmp_cmd->add_option("baseline", base_file, "Baseline results.csv")->required();
  cmp_cmd->add_option("candidate", cand_file, "Candidate results.csv")->required();
  cmp_cmd->add_option("--metric", metric, "L1_MISSES, L2_MISSES or TRANSACTIONS")->required();
  cmp_cmd->add_option("--baseline-id", base_id, "Experiment to take from the baseline file");
  cmp_cmd->add_option("--candidate-id", cand_id, "Experiment to take from the candidate file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (run_cmd->parsed()) return run(config, out_dir, seed, dump_trace, jobs);
    if (cmp_cmd->parsed()) return compare_files(base_file, cand_file, metric, base_id, cand_id);
    list_workloads();
    return 0;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation_failure(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
