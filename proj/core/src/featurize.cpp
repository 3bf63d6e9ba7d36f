#include "scout/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>

#include "scout/error.hpp"
#include "text.hpp"

namespace scout {

ConfigFeatures encode_config(const CloudConfig& config, const ConfigSpace& space) {
  if (!space.contains(config))
    throw Error(ErrorCode::kUnknownConfig, "config not in space: " + to_string(config));
  const InstanceSpec& spec = space.spec(config);
  ConfigFeatures f{};
  f[kSlotFamilyC] = config.family == Family::kC ? 1.0 : 0.0;
  f[kSlotFamilyM] = config.family == Family::kM ? 1.0 : 0.0;
  f[kSlotFamilyR] = config.family == Family::kR ? 1.0 : 0.0;
  f[kSlotSizeOrdinal] = static_cast<double>(static_cast<int>(config.size) + 1);
  f[kSlotNodeCount] = config.node_count;
  f[kSlotTotalCores] = static_cast<double>(config.node_count) * spec.vcpus_per_node;
  f[kSlotMemPerCore] = spec.mem_gb_per_node / spec.vcpus_per_node;
  f[kSlotTotalMem] = spec.mem_gb_per_node * config.node_count;
  f[kSlotPricePerNode] = spec.price_per_node_hour;
  f[kSlotTotalPrice] = spec.price_per_node_hour * config.node_count;
  return f;
}

void fill_pair_features(const ConfigFeatures& fi, const ConfigFeatures& fj,
                        std::span<const double> li, std::span<double> out) {
  if (out.size() != pair_feature_dim(li.size()))
    throw Error(ErrorCode::kDimensionMismatch, "pair feature buffer has wrong length");
  auto it = std::copy(fi.begin(), fi.end(), out.begin());
  it = std::copy(fj.begin(), fj.end(), it);
  std::copy(li.begin(), li.end(), it);
}

std::vector<double> build_pair_features(const ConfigFeatures& fi, const ConfigFeatures& fj,
                                        std::span<const double> li, std::size_t metric_dim) {
  if (li.size() != metric_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "metric vector has " + std::to_string(li.size()) + " entries, expected " +
                    std::to_string(metric_dim));
  }
  std::vector<double> out(pair_feature_dim(metric_dim));
  fill_pair_features(fi, fj, li, out);
  return out;
}

std::vector<double> aggregate_samples(std::span<const std::vector<double>> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptySamples, "no samples to aggregate");
  const std::size_t raw = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != raw)
      throw Error(ErrorCode::kDimensionMismatch, "samples have differing metric counts");

  const std::size_t n = samples.size();
  const double nd = static_cast<double>(n);
  // Nearest rank: the ceil(0.9 n)-th smallest value.
  const std::size_t rank = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(0.9 * nd - 1e-9)), 1, n);

  std::vector<double> out(3 * raw);
  std::vector<double> column(n);
  for (std::size_t k = 0; k < raw; ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = samples[i][k];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    const double mean = sum / nd;
    double sq = 0.0;
    for (double v : column) sq += (v - mean) * (v - mean);
    out[k] = mean;
    out[raw + k] = std::sqrt(sq / nd);
    out[2 * raw + k] = column[rank - 1];
  }
  return out;
}

std::vector<std::string> aggregated_metric_names(std::span<const std::string> raw_names) {
  std::vector<std::string> names;
  names.reserve(3 * raw_names.size());
  for (const char* stat : {"mean_", "std_", "p90_"})
    for (const auto& n : raw_names) names.push_back(stat + n);
  return names;
}

PerfDatabase aggregate_sample_file(std::istream& samples, ConfigSpace space,
                                   double sample_period_s) {
  if (!(sample_period_s > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "sample period must be > 0");
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(samples, line)) throw Error(ErrorCode::kParseError, "empty sample file");
  ++line_no;
  auto header = text::split(text::trim(line), ',');
  const char* const fixed[] = {"workload_id", "family", "size", "node_count", "sample_idx"};
  if (header.size() < 5) fail("sample header too short");
  for (std::size_t i = 0; i < 5; ++i)
    if (text::trim(header[i]) != fixed[i]) fail("unexpected sample header");
  std::vector<std::string> raw_names;
  for (std::size_t i = 5; i < header.size(); ++i) {
    auto name = text::trim(header[i]);
    if (name.size() < 3 || name.substr(0, 2) != "m_") fail("metric columns must be m_<name>");
    raw_names.emplace_back(name.substr(2));
  }

  // Groups keep first-appearance order so the output is stable.
  std::vector<std::pair<std::string, CloudConfig>> order;
  std::map<std::pair<std::string, CloudConfig>, std::map<long long, std::vector<double>>> groups;
  while (std::getline(samples, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(text::trim(line), ',');
    if (fields.size() != header.size())
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + ": wrong column count");
    std::string workload(text::trim(fields[0]));
    auto family = parse_family(text::trim(fields[1]));
    auto size = parse_size(text::trim(fields[2]));
    long long nodes = 0;
    long long idx = 0;
    if (workload.empty() || !family || !size || !text::parse_int(fields[3], nodes) || nodes < 1 ||
        !text::parse_int(fields[4], idx))
      fail("malformed sample row");
    std::vector<double> values(raw_names.size());
    for (std::size_t k = 0; k < raw_names.size(); ++k)
      if (!text::parse_double(fields[5 + k], values[k]) || !std::isfinite(values[k]))
        fail("bad metric value");
    auto key = std::make_pair(workload, CloudConfig{*family, *size, static_cast<int>(nodes)});
    auto& group = groups[key];
    if (group.empty()) order.push_back(key);
    if (!group.emplace(idx, std::move(values)).second) fail("duplicate sample_idx");
  }

  std::vector<Measurement> records;
  for (const auto& key : order) {
    std::vector<std::vector<double>> rows;
    for (auto& [idx, values] : groups[key]) rows.push_back(std::move(values));
    Measurement m;
    m.workload_id = key.first;
    m.config = key.second;
    m.elapsed_s = static_cast<double>(rows.size()) * sample_period_s;
    m.metrics = aggregate_samples(rows);
    records.push_back(std::move(m));
  }
  try {
    return PerfDatabase(std::move(space), aggregated_metric_names(raw_names), std::move(records));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIncompleteGrid) throw;
    throw Error(ErrorCode::kParseError, e.what());
  }
}

}  // namespace scout
