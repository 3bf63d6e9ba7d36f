#pragma once

// Configuration space and the grid-complete performance database that acts as
// both the historical training data and the replay oracle for searches.

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scout {

enum class Family : std::uint8_t { kC, kM, kR };
enum class Size : std::uint8_t { kLarge, kXLarge, kTwoXLarge };

inline constexpr std::array<Family, 3> kAllFamilies{Family::kC, Family::kM, Family::kR};
inline constexpr std::array<Size, 3> kAllSizes{Size::kLarge, Size::kXLarge, Size::kTwoXLarge};

std::string_view to_string(Family family);  // "c4", "m4", "r4"
std::string_view to_string(Size size);      // "large", "xlarge", "2xlarge"
std::optional<Family> parse_family(std::string_view s);
std::optional<Size> parse_size(std::string_view s);

struct CloudConfig {
  Family family = Family::kC;
  Size size = Size::kLarge;
  int node_count = 1;

  auto operator<=>(const CloudConfig&) const = default;
};

// "c4.large:4"
std::string to_string(const CloudConfig& config);
std::optional<CloudConfig> parse_config(std::string_view s);

struct InstanceSpec {
  int vcpus_per_node = 1;
  double mem_gb_per_node = 1.0;
  double price_per_node_hour = 1.0;

  bool operator==(const InstanceSpec&) const = default;
};

using InstanceKey = std::pair<Family, Size>;

class ConfigSpace {
 public:
  // Throws InvalidArgument on duplicates, missing specs or out-of-range specs.
  ConfigSpace(std::vector<CloudConfig> configs, std::map<InstanceKey, InstanceSpec> specs);

  const std::vector<CloudConfig>& configs() const { return configs_; }
  const std::map<InstanceKey, InstanceSpec>& instance_specs() const { return specs_; }
  std::size_t size() const { return configs_.size(); }
  const CloudConfig& at(std::size_t index) const { return configs_.at(index); }

  std::optional<std::size_t> index_of(const CloudConfig& config) const;
  bool contains(const CloudConfig& config) const { return index_of(config).has_value(); }
  // Throws UnknownConfig.
  std::size_t require_index(const CloudConfig& config) const;
  const InstanceSpec& spec(const CloudConfig& config) const;
  const InstanceSpec& spec(Family family, Size size) const;

  // Middle of the declaration order, the default Scout starting point.
  std::size_t midpoint_index() const { return configs_.size() / 2; }

  bool operator==(const ConfigSpace& other) const {
    return configs_ == other.configs_ && specs_ == other.specs_;
  }

 private:
  std::vector<CloudConfig> configs_;
  std::map<InstanceKey, InstanceSpec> specs_;
  std::map<CloudConfig, std::size_t> index_;
};

// The 72-cell {c4,m4,r4} x {large,xlarge,2xlarge} grid shipped in
// data/default_space.csv.
ConfigSpace default_space();

ConfigSpace read_space(std::istream& in);
ConfigSpace load_space(const std::filesystem::path& path);
void write_space(std::ostream& out, const ConfigSpace& space);

struct Measurement {
  std::string workload_id;
  CloudConfig config;
  double elapsed_s = 0.0;
  std::vector<double> metrics;

  bool operator==(const Measurement&) const = default;
};

enum class Objective { kTime, kCost, kTimeCostProduct };

std::string_view to_string(Objective objective);  // "time", "cost", "time_cost"
std::optional<Objective> parse_objective(std::string_view s);

class PerfDatabase {
 public:
  // Validates grid completeness and the metric dimension. Record order is
  // irrelevant; workloads keep their first-appearance order.
  PerfDatabase(ConfigSpace space, std::vector<std::string> metric_names,
               std::vector<Measurement> records);

  const ConfigSpace& space() const { return space_; }
  const std::vector<std::string>& metric_names() const { return metric_names_; }
  std::size_t metric_dimension() const { return metric_names_.size(); }
  const std::vector<std::string>& workloads() const { return workloads_; }

  bool has_workload(std::string_view workload) const;
  // Throws UnknownWorkload.
  std::size_t workload_index(std::string_view workload) const;
  // Throws MissingRecord for unknown workloads or configs outside the space.
  const Measurement& lookup(std::string_view workload, const CloudConfig& config) const;
  const Measurement& at(std::size_t workload_index, std::size_t config_index) const {
    return grid_[workload_index][config_index];
  }

  bool operator==(const PerfDatabase& other) const {
    return space_ == other.space_ && metric_names_ == other.metric_names_ &&
           workloads_ == other.workloads_ && grid_ == other.grid_;
  }

 private:
  ConfigSpace space_;
  std::vector<std::string> metric_names_;
  std::vector<std::string> workloads_;
  std::map<std::string, std::size_t, std::less<>> workload_index_;
  std::vector<std::vector<Measurement>> grid_;  // [workload][config index]
};

// Time: elapsed_s. Cost: node-hours times price. TimeCostProduct: their product.
// Throws UnknownConfig.
double objective_value(const Measurement& m, const ConfigSpace& space, Objective objective);

struct Optimum {
  CloudConfig config;
  double value = 0.0;
};

// Exhaustive minimum; ties go to the earlier config in space order.
Optimum optimal(const PerfDatabase& db, std::string_view workload, Objective objective);

PerfDatabase read_database(std::istream& in, ConfigSpace space);
PerfDatabase load_database(const std::filesystem::path& db_path,
                           const std::filesystem::path& space_path);
PerfDatabase load_database(const std::filesystem::path& db_path, ConfigSpace space);
void write_database(std::ostream& out, const PerfDatabase& db);
void save_database(const std::filesystem::path& path, const PerfDatabase& db);

}  // namespace scout
