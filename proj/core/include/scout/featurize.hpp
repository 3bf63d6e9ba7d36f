#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "scout/perfdb.hpp"

namespace scout {

// Numeric encoding of a configuration. Slot order is fixed.
enum ConfigFeatureSlot : std::size_t {
  kSlotFamilyC,
  kSlotFamilyM,
  kSlotFamilyR,
  kSlotSizeOrdinal,  // large=1, xlarge=2, 2xlarge=3
  kSlotNodeCount,
  kSlotTotalCores,
  kSlotMemPerCore,
  kSlotTotalMem,
  kSlotPricePerNode,
  kSlotTotalPrice,
  kConfigFeatureCount,
};

using ConfigFeatures = std::array<double, kConfigFeatureCount>;

// Throws UnknownConfig.
ConfigFeatures encode_config(const CloudConfig& config, const ConfigSpace& space);

constexpr std::size_t pair_feature_dim(std::size_t metric_dim) {
  return 2 * kConfigFeatureCount + metric_dim;
}

// [fi | fj | li]. Throws DimensionMismatch if li.size() != metric_dim.
std::vector<double> build_pair_features(const ConfigFeatures& fi, const ConfigFeatures& fj,
                                        std::span<const double> li, std::size_t metric_dim);
// Same layout, written into a caller-owned buffer of pair_feature_dim(li.size()).
void fill_pair_features(const ConfigFeatures& fi, const ConfigFeatures& fj,
                        std::span<const double> li, std::span<double> out);

// Per raw metric: population mean, population std, nearest-rank p90.
// Output is all means, then all stds, then all p90s (3R values).
// Throws EmptySamples or DimensionMismatch.
std::vector<double> aggregate_samples(std::span<const std::vector<double>> samples);

std::vector<std::string> aggregated_metric_names(std::span<const std::string> raw_names);

// Reads raw per-interval samples (workload_id,family,size,node_count,sample_idx,m_<name>...)
// and aggregates each (workload, config) group into one database row. With no
// timing information in the sample file, elapsed_s = sample count * period.
PerfDatabase aggregate_sample_file(std::istream& samples, ConfigSpace space,
                                   double sample_period_s = 5.0);

}  // namespace scout
