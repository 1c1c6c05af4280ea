#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cachesim/error.hpp"
#include "cachesim/harness.hpp"

namespace cachesim {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw SimError(ErrorCode::PARSE_ERROR, where + ": " + what);
}

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw SimError(ErrorCode::VALIDATION_ERROR, where + ": " + what);
}

// Typed access to one JSON object, remembering its path for messages and
// which keys were consumed so leftovers can be reported as unknown.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) parse_fail(path_, "expected an object");
  }

  const std::string& path() const noexcept { return path_; }
  bool has(const std::string& key) const { return value_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = value_.find(key);
    return it == value_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  std::optional<std::string> string(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) parse_fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::uint64_t> uint(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) return std::nullopt;
    return as_uint(*v, field(key));
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) parse_fail(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<Node> object(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) return std::nullopt;
    return Node(*v, field(key));
  }

  template <typename Enum, typename Parser>
  std::optional<Enum> enumeration(const std::string& key, Parser parse) {
    auto text = string(key);
    if (!text) return std::nullopt;
    auto value = parse(*text);
    if (!value) parse_fail(field(key), "unknown value '" + *text + "'");
    return *value;
  }

  void reject_unknown() const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      if (!seen_.contains(it.key())) parse_fail(field(it.key()), "unknown key");
    }
  }

  // Unsigned integers may be written as numbers or "0x..." strings.
  static std::uint64_t as_uint(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const auto i = v.get<std::int64_t>();
      if (i < 0) parse_fail(where, "must not be negative");
      return static_cast<std::uint64_t>(i);
    }
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      try {
        std::size_t used = 0;
        const std::uint64_t out = std::stoull(s, &used, 0);
        if (used == s.size() && !s.empty() && s[0] != '-') return out;
      } catch (const std::exception&) {
      }
      parse_fail(where, "'" + s + "' is not an unsigned integer");
    }
    parse_fail(where, "expected an unsigned integer");
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

std::uint32_t narrow32(std::uint64_t v, const std::string& where) {
  if (v > 0xffff'ffffULL) invalid(where, "value too large");
  return static_cast<std::uint32_t>(v);
}

WorkloadSpec parse_workload(Node node) {
  WorkloadSpec w;
  auto technique = node.enumeration<Technique>("technique", parse_technique);
  if (!technique) invalid(node.field("technique"), "required");
  auto platform = node.enumeration<Platform>("platform", parse_platform);
  if (!platform) invalid(node.field("platform"), "required");
  auto n = node.uint("n");
  if (!n) invalid(node.field("n"), "required");
  w.technique = *technique;
  w.platform = *platform;
  w.n = *n;
  w.variant = node.enumeration<Variant>("variant", parse_variant).value_or(default_variant(w.technique));
  if (auto v = node.uint("element_size")) w.element_size = narrow32(*v, node.field("element_size"));
  if (auto v = node.uint("block")) w.block = *v;
  if (auto v = node.uint("stride")) w.stride = *v;
  if (auto v = node.uint("tile_edge")) w.tile_edge = narrow32(*v, node.field("tile_edge"));
  if (const json* bases = node.get("bases")) {
    if (!bases->is_object()) parse_fail(node.field("bases"), "expected an object of name: address");
    for (auto it = bases->begin(); it != bases->end(); ++it) {
      w.bases[it.key()] = Node::as_uint(it.value(), node.field("bases") + "." + it.key());
    }
  }
  node.reject_unknown();
  return w;
}

HierarchySpec parse_hierarchy(Node node, Platform platform) {
  HierarchySpec h;
  h.preset = platform;
  if (auto preset = node.string("preset")) {
    if (*preset == "cpu") {
      h.preset = Platform::CPU;
    } else if (*preset == "gpu") {
      h.preset = Platform::GPU;
    } else {
      parse_fail(node.field("preset"), "unknown preset '" + *preset + "' (expected cpu or gpu)");
    }
  }
  h.mode = node.enumeration<GpuCacheMode>("mode", parse_gpu_mode);
  h.replacement = node.enumeration<Replacement>("replacement", parse_replacement);
  if (auto levels = node.object("levels")) {
    for (const char* name : {"L1", "L2", "L3"}) {
      auto level = levels->object(name);
      if (!level) continue;
      LevelOverride o;
      o.capacity = level->uint("capacity");
      if (auto v = level->uint("line_size")) o.line_size = narrow32(*v, level->field("line_size"));
      if (auto v = level->uint("associativity")) o.associativity = narrow32(*v, level->field("associativity"));
      o.replacement = level->enumeration<Replacement>("replacement", parse_replacement);
      o.write_policy = level->enumeration<WritePolicy>("write_policy", parse_write_policy);
      o.enabled = level->boolean("enabled");
      level->reject_unknown();
      h.levels[name] = o;
    }
    levels->reject_unknown();
  }
  node.reject_unknown();
  return h;
}

ExecModelConfig parse_exec(Node node) {
  ExecModelConfig e;
  if (auto v = node.uint("warp_size")) e.warp_size = narrow32(*v, node.field("warp_size"));
  if (auto v = node.uint("threads_per_block")) e.threads_per_block = narrow32(*v, node.field("threads_per_block"));
  if (auto v = node.uint("block_dim_x")) e.block_dim_x = narrow32(*v, node.field("block_dim_x"));
  if (auto v = node.uint("num_sms")) e.num_sms = narrow32(*v, node.field("num_sms"));
  if (auto v = node.uint("segment_size")) e.segment_size = narrow32(*v, node.field("segment_size"));
  if (auto v = node.uint("max_resident_warps")) e.max_resident_warps = narrow32(*v, node.field("max_resident_warps"));
  if (auto s = node.string("scheduling")) {
    if (*s != "ROUND_ROBIN_WARP") parse_fail(node.field("scheduling"), "unknown value '" + *s + "'");
  }
  if (auto v = node.boolean("coalescing")) e.coalescing = *v;
  node.reject_unknown();
  return e;
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

HierarchyConfig resolve(const HierarchySpec& spec, std::uint64_t seed) {
  HierarchyConfig h;
  if (spec.preset == Platform::CPU) {
    if (spec.mode) invalid("hierarchy.mode", "only the gpu preset has cache modes");
    h = cpu_preset();
  } else {
    h = gpu_preset(spec.mode.value_or(GpuCacheMode::L1_16K));
  }
  for (std::size_t k = 0; k < h.levels.size(); ++k) {
    CacheLevelConfig& level = h.levels[k];
    level.random_seed = seed + k;
    if (spec.replacement) level.replacement = *spec.replacement;
  }
  for (const auto& [name, o] : spec.levels) {
    CacheLevelConfig* level = h.find(name);
    if (level == nullptr) invalid("hierarchy.levels." + name, "no such level in the preset");
    if (o.capacity) level->capacity = *o.capacity;
    if (o.line_size) level->line_size = *o.line_size;
    if (o.associativity) level->associativity = *o.associativity;
    if (o.replacement) level->replacement = *o.replacement;
    if (o.write_policy) level->write_policy = *o.write_policy;
    if (o.enabled) level->enabled = *o.enabled;
  }
  validate(h);
  return h;
}

void validate(const ExperimentConfig& cfg) {
  const std::string where = "experiment '" + cfg.id + "'";
  if (cfg.id.empty()) invalid("experiment", "id must not be empty");
  try {
    validate(cfg.workload);
  } catch (const SimError& e) {
    invalid(where, e.what());
  }
  if (cfg.hierarchy.preset != cfg.workload.platform) {
    invalid(where, "hierarchy preset does not match the workload platform");
  }
  HierarchyConfig h;
  try {
    h = resolve(cfg.hierarchy, cfg.seed);
  } catch (const SimError& e) {
    if (e.code() == ErrorCode::VALIDATION_ERROR) throw;
    invalid(where, e.what());
  }
  if (cfg.workload.platform == Platform::CPU) {
    if (cfg.exec) invalid(where, "CPU workloads take no exec section");
    return;
  }
  if (!cfg.exec) invalid(where, "GPU workloads require an exec section");
  try {
    validate(*cfg.exec);
  } catch (const SimError& e) {
    invalid(where, e.what());
  }
  if (cfg.exec->segment_size != h.first_enabled_line_size()) {
    invalid(where, "exec.segment_size " + std::to_string(cfg.exec->segment_size) +
                       " differs from the first enabled line size " + std::to_string(h.first_enabled_line_size()));
  }
}

std::vector<ExperimentConfig> parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SimError(ErrorCode::PARSE_ERROR, line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  Node root(doc, "$");
  const json* list = root.get("experiments");
  if (list == nullptr) parse_fail("$.experiments", "required");
  if (!list->is_array()) parse_fail("$.experiments", "expected an array");
  root.reject_unknown();

  std::vector<ExperimentConfig> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list->size(); ++i) {
    Node node((*list)[i], "$.experiments[" + std::to_string(i) + "]");
    ExperimentConfig cfg;
    auto id = node.string("id");
    if (!id || id->empty()) invalid(node.field("id"), "required");
    cfg.id = *id;
    if (!ids.insert(cfg.id).second) invalid(node.field("id"), "duplicate experiment id '" + cfg.id + "'");

    auto workload = node.object("workload");
    if (!workload) invalid(node.field("workload"), "required");
    cfg.workload = parse_workload(*workload);

    if (auto hierarchy = node.object("hierarchy")) {
      cfg.hierarchy = parse_hierarchy(*hierarchy, cfg.workload.platform);
    } else {
      cfg.hierarchy.preset = cfg.workload.platform;
    }
    if (auto exec = node.object("exec")) {
      cfg.exec = parse_exec(*exec);
      // segment_size follows the hierarchy unless pinned explicitly.
      if (!exec->has("segment_size") && cfg.workload.platform == Platform::GPU) {
        try {
          cfg.exec->segment_size = resolve(cfg.hierarchy, 0).first_enabled_line_size();
        } catch (const SimError&) {
          // Reported by validate() below with full context.
        }
      }
    }
    cfg.warmup = node.boolean("warmup").value_or(false);
    cfg.seed = node.uint("seed").value_or(0);
    cfg.dump_trace = node.boolean("dump_trace").value_or(false);
    node.reject_unknown();
    validate(cfg);
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError(ErrorCode::IO_ERROR, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace cachesim
