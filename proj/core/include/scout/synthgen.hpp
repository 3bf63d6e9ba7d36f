#pragma once

// Deterministic synthetic performance databases built from a parametric
// strong-scaling workload model.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "scout/perfdb.hpp"

namespace scout {

struct WorkloadProfile {
  std::string workload_id;
  double work_core_s = 1.0;             // total parallelizable + serial work, core-seconds
  double serial_frac = 0.0;             // [0, 1]
  double mem_demand_gb_per_core = 0.0;  // >= 0
  double cpu_speed_weight = 0.0;        // [0, 1]; how much family CPU speed matters
  double shuffle_coef = 0.0;            // seconds per node
  double noise_sigma = 0.0;             // lognormal sigma, >= 0
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidArgument
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

// work_core_s is drawn log-uniformly, everything else uniformly.
struct ProfileRanges {
  Range work_core_s{2.0e4, 4.0e5};
  Range serial_frac{0.0, 0.15};
  Range mem_demand_gb_per_core{0.5, 10.0};
  Range cpu_speed_weight{0.0, 1.0};
  Range shuffle_coef{0.0, 30.0};
  Range noise_sigma{0.0, 0.0};
};

struct GenParams {
  std::size_t n_workloads = 20;
  std::map<Family, double> family_speed{
      {Family::kC, 1.2}, {Family::kM, 1.0}, {Family::kR, 0.9}};
  double mem_penalty_coef = 0.5;
  std::size_t metric_dimension = 16;
  std::uint64_t master_seed = 1;
  ProfileRanges ranges;

  void validate(const ConfigSpace& space) const;  // throws InvalidArgument
};

// key = value lines, '#' comments. Keys: n_workloads, master_seed,
// metric_dimension, mem_penalty_coef, family_speed.<c4|m4|r4>,
// range.<profile field> = min, max. Unspecified keys keep their defaults.
GenParams read_gen_params(std::istream& in);
GenParams load_gen_params(const std::filesystem::path& path);
void write_gen_params(std::ostream& out, const GenParams& params);

// The three additive components of the noiseless time.
struct TimeBreakdown {
  double serial_s = 0.0;
  double parallel_s = 0.0;  // includes the memory penalty
  double shuffle_s = 0.0;
  double compute_s = 0.0;   // parallel_s without the memory penalty
  double mem_penalty = 1.0;
  std::size_t cores = 0;
  double mem_per_core_gb = 0.0;

  double total() const { return serial_s + parallel_s + shuffle_s; }
};

TimeBreakdown time_breakdown(const WorkloadProfile& p, const CloudConfig& c,
                             const ConfigSpace& space, const GenParams& params);

// Noiseless time times a mean-one lognormal factor seeded by (p.seed, c).
// Throws UnknownConfig.
double simulate_time(const WorkloadProfile& p, const CloudConfig& c, const ConfigSpace& space,
                     const GenParams& params);

// The first six entries are, in order: cpu_util, mem_util, paging_rate,
// net_frac, serial_stall, cores_busy. The rest are seeded distractors.
std::vector<double> simulate_metrics(const WorkloadProfile& p, const CloudConfig& c, double t,
                                     const ConfigSpace& space, const GenParams& params);

std::vector<std::string> synthetic_metric_names(std::size_t dimension);

std::vector<WorkloadProfile> draw_profiles(const GenParams& params);

PerfDatabase generate_database(const GenParams& params, const ConfigSpace& space);
PerfDatabase generate_database(const std::vector<WorkloadProfile>& profiles,
                               const GenParams& params, const ConfigSpace& space);

}  // namespace scout
