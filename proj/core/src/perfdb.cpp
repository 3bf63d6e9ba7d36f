#include "scout/perfdb.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "scout/error.hpp"
#include "text.hpp"

namespace scout {
namespace {

constexpr std::string_view kSpaceHeader =
    "family,size,vcpus_per_node,mem_gb_per_node,price_per_node_hour,node_counts";
constexpr std::string_view kDbHeaderPrefix = "workload_id,family,size,node_count,elapsed_s";

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + what);
}

std::string spec_label(Family f, Size s) {
  return std::string(to_string(f)) + "." + std::string(to_string(s));
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kC: return "c4";
    case Family::kM: return "m4";
    case Family::kR: return "r4";
  }
  return "?";
}

std::string_view to_string(Size size) {
  switch (size) {
    case Size::kLarge: return "large";
    case Size::kXLarge: return "xlarge";
    case Size::kTwoXLarge: return "2xlarge";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view s) {
  for (Family f : kAllFamilies)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::optional<Size> parse_size(std::string_view s) {
  for (Size z : kAllSizes)
    if (to_string(z) == s) return z;
  return std::nullopt;
}

std::string to_string(const CloudConfig& config) {
  return spec_label(config.family, config.size) + ":" + std::to_string(config.node_count);
}

std::optional<CloudConfig> parse_config(std::string_view s) {
  const auto dot = s.find('.');
  const auto colon = s.find(':');
  if (dot == std::string_view::npos || colon == std::string_view::npos || colon < dot)
    return std::nullopt;
  auto family = parse_family(s.substr(0, dot));
  auto size = parse_size(s.substr(dot + 1, colon - dot - 1));
  long long nodes = 0;
  if (!family || !size || !text::parse_int(s.substr(colon + 1), nodes) || nodes < 1)
    return std::nullopt;
  return CloudConfig{*family, *size, static_cast<int>(nodes)};
}

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kTime: return "time";
    case Objective::kCost: return "cost";
    case Objective::kTimeCostProduct: return "time_cost";
  }
  return "?";
}

std::optional<Objective> parse_objective(std::string_view s) {
  for (Objective o : {Objective::kTime, Objective::kCost, Objective::kTimeCostProduct})
    if (to_string(o) == s) return o;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ConfigSpace

ConfigSpace::ConfigSpace(std::vector<CloudConfig> configs,
                         std::map<InstanceKey, InstanceSpec> specs)
    : configs_(std::move(configs)), specs_(std::move(specs)) {
  for (const auto& [key, spec] : specs_) {
    if (spec.vcpus_per_node < 1 || !(spec.mem_gb_per_node > 0.0) ||
        !(spec.price_per_node_hour > 0.0) || !std::isfinite(spec.mem_gb_per_node) ||
        !std::isfinite(spec.price_per_node_hour)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "instance spec out of range for " + spec_label(key.first, key.second));
    }
  }
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    const CloudConfig& c = configs_[i];
    if (c.node_count < 1)
      throw Error(ErrorCode::kInvalidArgument, "node_count must be >= 1: " + to_string(c));
    if (!specs_.contains({c.family, c.size}))
      throw Error(ErrorCode::kInvalidArgument, "no instance spec for " + to_string(c));
    if (!index_.emplace(c, i).second)
      throw Error(ErrorCode::kInvalidArgument, "duplicate config " + to_string(c));
  }
}

std::optional<std::size_t> ConfigSpace::index_of(const CloudConfig& config) const {
  auto it = index_.find(config);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ConfigSpace::require_index(const CloudConfig& config) const {
  auto idx = index_of(config);
  if (!idx) throw Error(ErrorCode::kUnknownConfig, "config not in space: " + to_string(config));
  return *idx;
}

const InstanceSpec& ConfigSpace::spec(const CloudConfig& config) const {
  return spec(config.family, config.size);
}

const InstanceSpec& ConfigSpace::spec(Family family, Size size) const {
  auto it = specs_.find({family, size});
  if (it == specs_.end())
    throw Error(ErrorCode::kUnknownConfig, "no instance spec for " + spec_label(family, size));
  return it->second;
}

ConfigSpace default_space() {
  const std::map<Size, std::vector<int>> node_counts{
      {Size::kLarge, {4, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48}},
      {Size::kXLarge, {4, 6, 8, 10, 12, 16, 20, 24}},
      {Size::kTwoXLarge, {4, 6, 8, 10, 12}},
  };
  const std::map<InstanceKey, InstanceSpec> specs{
      {{Family::kC, Size::kLarge}, {2, 3.75, 0.10}},
      {{Family::kC, Size::kXLarge}, {4, 7.5, 0.199}},
      {{Family::kC, Size::kTwoXLarge}, {8, 15.0, 0.398}},
      {{Family::kM, Size::kLarge}, {2, 8.0, 0.10}},
      {{Family::kM, Size::kXLarge}, {4, 16.0, 0.20}},
      {{Family::kM, Size::kTwoXLarge}, {8, 32.0, 0.40}},
      {{Family::kR, Size::kLarge}, {2, 15.25, 0.133}},
      {{Family::kR, Size::kXLarge}, {4, 30.5, 0.266}},
      {{Family::kR, Size::kTwoXLarge}, {8, 61.0, 0.532}},
  };
  std::vector<CloudConfig> configs;
  for (Family f : kAllFamilies)
    for (Size s : kAllSizes)
      for (int n : node_counts.at(s)) configs.push_back({f, s, n});
  return ConfigSpace(std::move(configs), specs);
}

ConfigSpace read_space(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "empty space file");
  ++line_no;
  if (text::trim(line) != kSpaceHeader) parse_fail(line_no, "unexpected space header");

  std::vector<CloudConfig> configs;
  std::map<InstanceKey, InstanceSpec> specs;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line, ',');
    if (fields.size() != 6) parse_fail(line_no, "expected 6 fields");
    auto family = parse_family(text::trim(fields[0]));
    auto size = parse_size(text::trim(fields[1]));
    if (!family) parse_fail(line_no, "unknown family");
    if (!size) parse_fail(line_no, "unknown size");
    long long vcpus = 0;
    InstanceSpec spec;
    if (!text::parse_int(fields[2], vcpus) || vcpus < 1) parse_fail(line_no, "bad vcpus_per_node");
    spec.vcpus_per_node = static_cast<int>(vcpus);
    if (!text::parse_double(fields[3], spec.mem_gb_per_node) || !(spec.mem_gb_per_node > 0.0))
      parse_fail(line_no, "bad mem_gb_per_node");
    if (!text::parse_double(fields[4], spec.price_per_node_hour) ||
        !(spec.price_per_node_hour > 0.0))
      parse_fail(line_no, "bad price_per_node_hour");
    if (!specs.emplace(InstanceKey{*family, *size}, spec).second)
      parse_fail(line_no, "duplicate instance type");
    auto counts = text::trim(fields[5]);
    if (counts.empty()) continue;
    for (auto part : text::split(counts, ';')) {
      long long n = 0;
      if (!text::parse_int(part, n) || n < 1) parse_fail(line_no, "bad node count");
      configs.push_back({*family, *size, static_cast<int>(n)});
    }
  }
  try {
    return ConfigSpace(std::move(configs), std::move(specs));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

ConfigSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open space file " + path.string());
  return read_space(in);
}

void write_space(std::ostream& out, const ConfigSpace& space) {
  out << kSpaceHeader << '\n';
  std::vector<InstanceKey> order;
  std::map<InstanceKey, std::vector<int>> counts;
  for (const CloudConfig& c : space.configs()) {
    InstanceKey key{c.family, c.size};
    if (!counts.contains(key)) order.push_back(key);
    counts[key].push_back(c.node_count);
  }
  for (const auto& [key, spec] : space.instance_specs())
    if (!counts.contains(key)) order.push_back(key);
  for (const InstanceKey& key : order) {
    const InstanceSpec& spec = space.instance_specs().at(key);
    out << to_string(key.first) << ',' << to_string(key.second) << ',' << spec.vcpus_per_node
        << ',' << text::format_double(spec.mem_gb_per_node) << ','
        << text::format_double(spec.price_per_node_hour) << ',';
    const auto& list = counts[key];
    for (std::size_t i = 0; i < list.size(); ++i) out << (i ? ";" : "") << list[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// PerfDatabase

PerfDatabase::PerfDatabase(ConfigSpace space, std::vector<std::string> metric_names,
                           std::vector<Measurement> records)
    : space_(std::move(space)), metric_names_(std::move(metric_names)) {
  const std::size_t n = space_.size();
  std::vector<std::vector<bool>> seen;
  for (Measurement& m : records) {
    if (m.metrics.size() != metric_names_.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "record " + m.workload_id + "/" + to_string(m.config) + " has " +
                      std::to_string(m.metrics.size()) + " metrics, expected " +
                      std::to_string(metric_names_.size()));
    }
    if (!std::isfinite(m.elapsed_s) || !(m.elapsed_s > 0.0))
      throw Error(ErrorCode::kInvalidArgument,
                  "elapsed_s must be finite and > 0 for " + m.workload_id);
    auto cfg = space_.index_of(m.config);
    if (!cfg)
      throw Error(ErrorCode::kUnknownConfig, "record config not in space: " + to_string(m.config));
    auto [it, inserted] = workload_index_.emplace(m.workload_id, workloads_.size());
    if (inserted) {
      workloads_.push_back(m.workload_id);
      grid_.emplace_back(n);
      seen.emplace_back(n, false);
    }
    if (seen[it->second][*cfg])
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate record " + m.workload_id + "/" + to_string(m.config));
    seen[it->second][*cfg] = true;
    grid_[it->second][*cfg] = std::move(m);
  }

  std::ostringstream missing;
  std::size_t missing_count = 0;
  for (std::size_t w = 0; w < workloads_.size(); ++w) {
    for (std::size_t c = 0; c < n; ++c) {
      if (seen[w][c]) continue;
      if (missing_count < 20)
        missing << (missing_count ? ", " : "") << workloads_[w] << "/"
                << to_string(space_.at(c));
      ++missing_count;
    }
  }
  if (missing_count > 0) {
    throw Error(ErrorCode::kIncompleteGrid, std::to_string(missing_count) +
                                                " missing (workload, config) records: " +
                                                missing.str() + (missing_count > 20 ? ", ..." : ""));
  }
}

bool PerfDatabase::has_workload(std::string_view workload) const {
  return workload_index_.find(workload) != workload_index_.end();
}

std::size_t PerfDatabase::workload_index(std::string_view workload) const {
  auto it = workload_index_.find(workload);
  if (it == workload_index_.end())
    throw Error(ErrorCode::kUnknownWorkload, "unknown workload " + std::string(workload));
  return it->second;
}

const Measurement& PerfDatabase::lookup(std::string_view workload,
                                        const CloudConfig& config) const {
  auto it = workload_index_.find(workload);
  auto cfg = space_.index_of(config);
  if (it == workload_index_.end() || !cfg)
    throw Error(ErrorCode::kMissingRecord,
                "no record for " + std::string(workload) + "/" + to_string(config));
  return grid_[it->second][*cfg];
}

double objective_value(const Measurement& m, const ConfigSpace& space, Objective objective) {
  if (!space.contains(m.config))
    throw Error(ErrorCode::kUnknownConfig, "config not in space: " + to_string(m.config));
  const InstanceSpec& spec = space.spec(m.config);
  const double time = m.elapsed_s;
  const double cost = time / 3600.0 * m.config.node_count * spec.price_per_node_hour;
  switch (objective) {
    case Objective::kTime: return time;
    case Objective::kCost: return cost;
    case Objective::kTimeCostProduct: return time * cost;
  }
  return time;
}

Optimum optimal(const PerfDatabase& db, std::string_view workload, Objective objective) {
  const std::size_t w = db.workload_index(workload);
  const ConfigSpace& space = db.space();
  if (space.size() == 0)
    throw Error(ErrorCode::kUnknownConfig, "empty configuration space");
  Optimum best{space.at(0), objective_value(db.at(w, 0), space, objective)};
  for (std::size_t c = 1; c < space.size(); ++c) {
    const double v = objective_value(db.at(w, c), space, objective);
    if (v < best.value) best = {space.at(c), v};
  }
  return best;
}

PerfDatabase read_database(std::istream& in, ConfigSpace space) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "empty database file");
  ++line_no;
  auto header = text::split(text::trim(line), ',');
  const std::size_t fixed = 5;
  {
    auto prefix = text::split(kDbHeaderPrefix, ',');
    if (header.size() < fixed) parse_fail(line_no, "database header too short");
    for (std::size_t i = 0; i < fixed; ++i)
      if (text::trim(header[i]) != prefix[i]) parse_fail(line_no, "unexpected database header");
  }
  std::vector<std::string> metric_names;
  for (std::size_t i = fixed; i < header.size(); ++i) {
    auto name = text::trim(header[i]);
    if (name.size() < 3 || name.substr(0, 2) != "m_")
      parse_fail(line_no, "metric columns must be named m_<name>");
    metric_names.emplace_back(name.substr(2));
  }

  std::vector<Measurement> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(text::trim(line), ',');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " columns, got " +
                      std::to_string(fields.size()));
    }
    Measurement m;
    m.workload_id = std::string(text::trim(fields[0]));
    if (m.workload_id.empty()) parse_fail(line_no, "empty workload_id");
    auto family = parse_family(text::trim(fields[1]));
    auto size = parse_size(text::trim(fields[2]));
    long long nodes = 0;
    if (!family) parse_fail(line_no, "unknown family");
    if (!size) parse_fail(line_no, "unknown size");
    if (!text::parse_int(fields[3], nodes) || nodes < 1) parse_fail(line_no, "bad node_count");
    m.config = {*family, *size, static_cast<int>(nodes)};
    if (!space.contains(m.config)) parse_fail(line_no, "config not in space: " + to_string(m.config));
    if (!text::parse_double(fields[4], m.elapsed_s) || !std::isfinite(m.elapsed_s) ||
        !(m.elapsed_s > 0.0))
      parse_fail(line_no, "elapsed_s must be a finite number > 0");
    m.metrics.resize(metric_names.size());
    for (std::size_t i = 0; i < metric_names.size(); ++i) {
      if (!text::parse_double(fields[fixed + i], m.metrics[i]) || !std::isfinite(m.metrics[i]))
        parse_fail(line_no, "bad metric value in column m_" + metric_names[i]);
    }
    records.push_back(std::move(m));
  }
  try {
    return PerfDatabase(std::move(space), std::move(metric_names), std::move(records));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIncompleteGrid || e.code() == ErrorCode::kDimensionMismatch)
      throw;
    throw Error(ErrorCode::kParseError, e.what());
  }
}

PerfDatabase load_database(const std::filesystem::path& db_path, ConfigSpace space) {
  std::ifstream in(db_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open database file " + db_path.string());
  return read_database(in, std::move(space));
}

PerfDatabase load_database(const std::filesystem::path& db_path,
                           const std::filesystem::path& space_path) {
  return load_database(db_path, load_space(space_path));
}

void write_database(std::ostream& out, const PerfDatabase& db) {
  out << kDbHeaderPrefix;
  for (const auto& name : db.metric_names()) out << ",m_" << name;
  out << '\n';
  for (std::size_t w = 0; w < db.workloads().size(); ++w) {
    for (std::size_t c = 0; c < db.space().size(); ++c) {
      const Measurement& m = db.at(w, c);
      out << m.workload_id << ',' << to_string(m.config.family) << ','
          << to_string(m.config.size) << ',' << m.config.node_count << ','
          << text::format_double(m.elapsed_s);
      for (double v : m.metrics) out << ',' << text::format_double(v);
      out << '\n';
    }
  }
}

void save_database(const std::filesystem::path& path, const PerfDatabase& db) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write database file " + path.string());
  write_database(out, db);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace scout
