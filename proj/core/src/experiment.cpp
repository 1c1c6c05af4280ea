#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "cachesim/error.hpp"
#include "cachesim/harness.hpp"

namespace cachesim {

namespace {

struct RunCounters {
  std::uint64_t accesses = 0;
  std::uint64_t transactions = 0;
};

RunCounters replay(const Workload& workload, Hierarchy& hierarchy, const ExecModelConfig& exec,
                   const AccessSink& dump) {
  RunCounters c;
  if (const auto* cpu = std::get_if<CpuWorkload>(&workload)) {
    cpu->emit([&](const MemoryAccess& a) {
      if (a.is_noop()) return;
      ++c.accesses;
      hierarchy.access(a);
      if (dump) dump(a);
    });
    c.transactions = c.accesses;
    return c;
  }
  const auto& gpu = std::get<GpuWorkload>(workload);
  for (const KernelPtr& kernel : gpu.launches) {
    const InterleaveStats s = interleave_grid(
        *kernel, exec,
        [&](const Transaction& tx) { hierarchy.probe(tx.segment_base, tx.kind, tx.array_tag, tx.sm); }, dump);
    c.accesses += s.accesses;
    c.transactions += s.transactions;
  }
  return c;
}

}  // namespace

std::string format_trace_line(const MemoryAccess& a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%u %c 0x%llx %u %u", a.thread_id, a.is_write() ? 'W' : 'R',
                static_cast<unsigned long long>(a.address), static_cast<unsigned>(a.size),
                static_cast<unsigned>(a.array_tag));
  return buf;
}

SimResult run_experiment(const ExperimentConfig& cfg, const AccessSink& dump) {
  validate(cfg);
  const HierarchyConfig hc = resolve(cfg.hierarchy, cfg.seed);
  GenOptions opt = gen_options_for(cfg.workload);
  ExecModelConfig exec;
  if (cfg.exec) exec = *cfg.exec;
  opt.exec = exec;
  if (hc.gpu_mode) opt.shared_memory_bytes = shared_memory_bytes(*hc.gpu_mode);

  const Workload workload = make_workload(cfg.workload, opt);
  const std::size_t copies = cfg.workload.platform == Platform::GPU ? exec.num_sms : 1;
  Hierarchy hierarchy(hc, copies);
  if (cfg.warmup) {
    replay(workload, hierarchy, exec, {});
    hierarchy.reset_stats();
  }
  const RunCounters c = replay(workload, hierarchy, exec, dump);

  SimResult r;
  r.experiment = cfg.id;
  r.levels = hierarchy.results();
  r.trace_length = c.accesses;
  r.transactions = c.transactions;
  r.workload_echo = cfg.workload;
  return r;
}

std::vector<SimResult> run_experiments(std::span<const ExperimentConfig> configs, unsigned jobs,
                                       const std::optional<std::filesystem::path>& trace_dir) {
  std::vector<SimResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        const ExperimentConfig& cfg = configs[i];
        if (cfg.dump_trace && trace_dir) {
          const auto path = *trace_dir / (cfg.id + ".trace");
          std::ofstream out(path, std::ios::binary);
          if (!out) throw SimError(ErrorCode::IO_ERROR, "cannot write " + path.string());
          results[i] = run_experiment(cfg, [&](const MemoryAccess& a) { out << format_trace_line(a) << '\n'; });
          if (!out) throw SimError(ErrorCode::IO_ERROR, "write failed: " + path.string());
        } else {
          results[i] = run_experiment(cfg);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace cachesim
